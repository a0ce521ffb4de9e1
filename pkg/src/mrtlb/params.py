"""Parameter sets for the fourth-order D2Q5 MRT lattice Boltzmann model.

The closed forms below give the rest weight ``w0`` and the relaxation rates
that cancel the leading truncation errors of the model, for the orthogonal
and natural transform matrices and for constant or linear source terms.
All functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

from .errors import DegenerateScaling, NegativeRadicand, RangeError

SQRT3 = math.sqrt(3.0)

#: Legal upper bound of epsilon for the natural-matrix family (w0 = 0).
NATURAL_EPS_MAX = 1.0 / (4.0 * SQRT3)


class MatrixKind(str, Enum):
    """Which moment basis the collision operator is written in."""

    ORTHOGONAL = "orthogonal_M"
    NATURAL = "natural_MN"


class BoundaryKind(str, Enum):
    PERIODIC = "periodic"
    DIRICHLET = "dirichlet"


@dataclass(frozen=True)
class DiffusionProblem:
    """Diffusion equation d_t phi = kappa lap(phi) + zeta phi + R on a rectangle.

    Attributes:
        kappa: Diffusion coefficient.
        source_const: Constant source ``R``.
        source_linear: Coefficient ``zeta`` of the linear source term.
        lx: Domain length in x.
        ly: Domain length in y.
        boundary_kind: Periodic or Dirichlet.
        x0: x coordinate of the lower-left corner.
        y0: y coordinate of the lower-left corner.
    """

    kappa: float
    source_const: float = 0.0
    source_linear: float = 0.0
    lx: float = 1.0
    ly: float = 1.0
    boundary_kind: BoundaryKind = BoundaryKind.PERIODIC
    x0: float = 0.0
    y0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "boundary_kind", BoundaryKind(self.boundary_kind))
        if not self.kappa > 0:
            raise RangeError(f"kappa must be positive, got {self.kappa}")
        if not (self.lx > 0 and self.ly > 0):
            raise RangeError(f"domain extents must be positive, got {self.lx}, {self.ly}")

    @property
    def periodic(self) -> bool:
        return self.boundary_kind is BoundaryKind.PERIODIC


@dataclass(frozen=True)
class Discretization:
    """Uniform lattice with spacing ``dx`` (= dy) and time step ``dt``.

    For periodic problems ``nx * dx == lx``; Dirichlet lattices store both
    boundary lines, so ``(nx - 1) * dx == lx``.
    """

    dx: float
    dt: float
    nx: int
    ny: int
    epsilon: float

    def __post_init__(self):
        if not (self.dx > 0 and self.dt > 0):
            raise RangeError(f"dx and dt must be positive, got {self.dx}, {self.dt}")
        if self.nx < 1 or self.ny < 1:
            raise RangeError("node counts must be positive")

    @property
    def c(self) -> float:
        """Lattice velocity dx/dt."""
        return self.dx / self.dt

    @classmethod
    def for_problem(cls, problem: DiffusionProblem, dx: float, dt: float) -> "Discretization":
        """Build the lattice covering ``problem``'s domain.

        Raises:
            RangeError: If the domain is not an integer number of cells.
        """
        cells = []
        for length in (problem.lx, problem.ly):
            n = round(length / dx)
            if n < 1 or abs(n * dx - length) > 1e-9 * length:
                raise RangeError(f"domain length {length} is not a multiple of dx={dx}")
            cells.append(n)
        extra = 0 if problem.periodic else 1
        eps = problem.kappa * dt / dx**2
        return cls(dx=dx, dt=dt, nx=cells[0] + extra, ny=cells[1] + extra, epsilon=eps)

    def coordinates(self, problem: DiffusionProblem):
        """1-D node coordinates along x and y."""
        import numpy as np

        x = problem.x0 + self.dx * np.arange(self.nx)
        y = problem.y0 + self.dx * np.arange(self.ny)
        return x, y


@dataclass(frozen=True)
class RelaxationSet:
    """Relaxation rates and rest weight of the D2Q5 MRT model.

    Attributes:
        s1: Rate of the conserved moment (a spectator).
        s2: Rate of the two flux moments.
        s4: Rate of the energy-like moment.
        s5: Rate of the anisotropic second-order moment.
        w0: Rest-particle weight; the four moving weights are (1 - w0)/4.
        matrix_kind: Moment basis the rates refer to.
        s2_modified: Modified rate used by the linear-source models; it fixes
            the diffusion coefficient while ``s2`` enters the collision.
        epsilon: Discretization parameter the set was derived for, if any.
    """

    s1: float
    s2: float
    s4: float
    s5: float
    w0: float
    matrix_kind: MatrixKind = MatrixKind.ORTHOGONAL
    s2_modified: float | None = None
    epsilon: float | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "matrix_kind", MatrixKind(self.matrix_kind))
        problems = []
        for name in ("s2", "s4", "s5"):
            v = getattr(self, name)
            if not (0.0 < v < 2.0):
                problems.append(f"{name}={v!r} outside (0, 2)")
        if not (0.0 < self.w0 < 1.0):
            problems.append(f"w0={self.w0!r} outside (0, 1)")
        if not math.isfinite(self.s1):
            problems.append(f"s1={self.s1!r} not finite")
        if self.s2_modified is not None and not (0.0 < self.s2_modified < 2.0):
            problems.append(f"s2_modified={self.s2_modified!r} outside (0, 2)")
        if problems:
            raise RangeError("; ".join(problems))

    @property
    def w_side(self) -> float:
        return (1.0 - self.w0) / 4.0

    @property
    def weights(self) -> tuple[float, float, float, float, float]:
        w = self.w_side
        return (self.w0, w, w, w, w)

    @property
    def s2_diffusive(self) -> float:
        """Rate that sets the diffusion coefficient (``s2_modified`` if present)."""
        return self.s2 if self.s2_modified is None else self.s2_modified

    def rates(self) -> tuple[float, float, float, float, float]:
        """Diagonal of the relaxation matrix, (s1, s2, s2, s4, s5)."""
        return (self.s1, self.s2, self.s2, self.s4, self.s5)

    def with_(self, **changes) -> "RelaxationSet":
        return replace(self, **changes)

    def to_config(self) -> dict[str, str]:
        """Flat key-value view used by the run-configuration format."""
        out = {
            "s1": repr(self.s1),
            "s2": repr(self.s2),
            "s4": repr(self.s4),
            "s5": repr(self.s5),
            "w0": repr(self.w0),
            "matrix_kind": self.matrix_kind.value,
        }
        if self.epsilon is not None:
            out["epsilon"] = repr(self.epsilon)
        if self.s2_modified is not None:
            out["s2_modified"] = repr(self.s2_modified)
        return out

    @classmethod
    def from_config(cls, cfg: dict[str, str]) -> "RelaxationSet":
        s2m = cfg.get("s2_modified")
        eps = cfg.get("epsilon")
        return cls(
            s1=float(cfg.get("s1", 1.0)),
            s2=float(cfg["s2"]),
            s4=float(cfg["s4"]),
            s5=float(cfg["s5"]),
            w0=float(cfg["w0"]),
            matrix_kind=MatrixKind(cfg.get("matrix_kind", MatrixKind.ORTHOGONAL.value)),
            s2_modified=None if s2m is None else float(s2m),
            epsilon=None if eps is None else float(eps),
        )


def fourth_order_closed_forms(epsilon, s5):
    """Return (w0, s2, s4) of the orthogonal-matrix fourth-order family.

    Plain arithmetic only, so exact number types (``Fraction``) pass through.
    """
    w0 = (s5 + (6 * s5 - 12) * epsilon) / s5
    s2 = (6 * s5 - 12) / (s5 - 6)
    s4 = (12 * epsilon * s5**2 - 24 * epsilon * s5 + 2 * s5**2) / (
        2 * s5 - 36 * epsilon + 24 * epsilon * s5 + epsilon * s5**2
    )
    return w0, s2, s4


def _build(check_eps, **kw) -> RelaxationSet:
    if not check_eps > 0:
        raise RangeError(f"epsilon must be positive, got {check_eps}")
    try:
        return RelaxationSet(**kw)
    except RangeError as exc:
        raise RangeError(f"epsilon={check_eps!r} gives an illegal set: {exc}") from None


def derive_fourth_order(epsilon: float, s5: float, s1: float = 1.0) -> RelaxationSet:
    """Fourth-order parameter set for the orthogonal transform matrix.

    Args:
        epsilon: kappa*dt/dx**2.
        s5: Free relaxation rate in (0, 2).
        s1: Spectator rate of the conserved moment.

    Raises:
        RangeError: If epsilon is not positive or a derived value is illegal.
    """
    if not (0.0 < s5 < 2.0):
        raise RangeError(f"s5={s5!r} outside (0, 2)")
    if not epsilon > 0:
        raise RangeError(f"epsilon must be positive, got {epsilon}")
    w0, s2, s4 = fourth_order_closed_forms(float(epsilon), float(s5))
    return _build(epsilon, s1=s1, s2=s2, s4=s4, s5=s5, w0=w0, epsilon=epsilon)


def derive_fourth_order_natural(epsilon: float, s1: float = 1.0) -> RelaxationSet:
    """Fourth-order parameter set for the natural transform matrix."""
    w0 = 1.0 - 4.0 * SQRT3 * epsilon
    s2 = 6.0 / (3.0 + SQRT3)
    s45 = 6.0 / (2.0 * SQRT3 + 3.0)
    return _build(
        epsilon, s1=s1, s2=s2, s4=s45, s5=s45, w0=w0,
        matrix_kind=MatrixKind.NATURAL, epsilon=epsilon,
    )


def derive_linear_source_v1(epsilon: float, s1: float = 1.0) -> RelaxationSet:
    """Fourth-order set for the linear-source model with s2 fixed to one."""
    den = 5.0 - 12.0 * epsilon
    if den == 0.0:
        raise RangeError("5 - 12*epsilon vanishes")
    return _build(
        epsilon, s1=s1, s2=1.0, s4=(6.0 - 24.0 * epsilon) / den, s5=1.2,
        w0=1.0 - 4.0 * epsilon, epsilon=epsilon,
    )


def modified_s2(s2_bar: float, zeta_dt: float) -> float:
    """Collision rate s2 whose zeta-corrected diffusivity matches ``s2_bar``.

    Solves (1/s2 - 1/2) - (1/s2**2 - 1/s2) * zeta_dt = 1/s2_bar - 1/2 for the
    root that tends to ``s2_bar`` as ``zeta_dt`` goes to zero.

    Raises:
        NegativeRadicand: If no real root exists.
    """
    if zeta_dt == 0.0:
        return s2_bar
    rad = (s2_bar - 4.0 * zeta_dt + zeta_dt**2 * s2_bar + 2.0 * zeta_dt * s2_bar) / s2_bar
    if rad < 0.0:
        raise NegativeRadicand(f"radicand {rad!r} < 0 for s2_bar={s2_bar!r}, zeta*dt={zeta_dt!r}")
    return 2.0 * zeta_dt / (zeta_dt - math.sqrt(rad) + 1.0)


def modified_s2_residual(s2: float, s2_bar: float, zeta_dt: float) -> float:
    """Residual of the defining identity of :func:`modified_s2`."""
    lhs = (1.0 / s2 - 0.5) - (1.0 / s2**2 - 1.0 / s2) * zeta_dt
    return lhs - (1.0 / s2_bar - 0.5)


def derive_linear_source_v2(
    epsilon: float, s5: float, zeta: float, dt: float, s1: float = 1.0
) -> RelaxationSet:
    """Fourth-order set for the linear-source model with a modified s2."""
    if not (0.0 < s5 < 2.0):
        raise RangeError(f"s5={s5!r} outside (0, 2)")
    if not epsilon > 0:
        raise RangeError(f"epsilon must be positive, got {epsilon}")
    w0, s2_bar, s4 = fourth_order_closed_forms(float(epsilon), float(s5))
    if not (0.0 < s2_bar < 2.0):
        raise RangeError(f"s2_bar={s2_bar!r} outside (0, 2)")
    s2 = modified_s2(s2_bar, zeta * dt)
    return _build(
        epsilon, s1=s1, s2=s2, s4=s4, s5=s5, w0=w0, s2_modified=s2_bar, epsilon=epsilon,
    )


def derive_linear_source_natural(
    epsilon: float, zeta: float, dt: float, s1: float = 1.0
) -> RelaxationSet:
    """Natural-matrix counterpart of :func:`derive_linear_source_v2`."""
    base = derive_fourth_order_natural(epsilon, s1=s1)
    s2 = modified_s2(base.s2, zeta * dt)
    return _build(
        epsilon, s1=s1, s2=s2, s4=base.s4, s5=base.s5, w0=base.w0,
        matrix_kind=MatrixKind.NATURAL, s2_modified=base.s2, epsilon=epsilon,
    )


def kappa_of(rset: RelaxationSet, disc: Discretization) -> float:
    """Diffusion coefficient ((1 - w0)/2) c^2 (1/s2 - 1/2) dt of a set."""
    return 0.5 * (1.0 - rset.w0) * disc.c**2 * (1.0 / rset.s2_diffusive - 0.5) * disc.dt


def magic_parameter(s_odd: float, s_even: float) -> float:
    """Two-relaxation-time combination (1/s_odd - 1/2)(1/s_even - 1/2)."""
    return (1.0 / s_odd - 0.5) * (1.0 / s_even - 0.5)


def source_scale(zeta: float, dt: float) -> float:
    """Denominator 1 - zeta*dt/2 of the linear-source conserved moment."""
    d = 1.0 - 0.5 * zeta * dt
    if d == 0.0:
        raise DegenerateScaling("zeta*dt = 2 makes the conserved moment undefined")
    return d
