"""Macroscopic multi-level finite-difference schemes equivalent to the LB model.

Each scheme advances phi with a stencil spanning up to five past time levels:

    phi^{n+1} = sum_k [ a_k phi^{n-k} + b_k (x-neighbours) + c_k (y-neighbours)
                        + d_k (diagonal neighbours) ] + dt * delta * R

with k = 0..4. The coefficient closed forms are written in the collision
rates and the rest weight.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .errors import HistoryUnderflow, NoAnalyticSolution, SchemeMismatch, ShapeMismatch
from .params import DiffusionProblem, Discretization, MatrixKind, RelaxationSet


class SchemeKind(str, Enum):
    SLFD = "SLFD"
    FLFD = "FLFD"
    SLFD_AL = "SLFD_AL"
    SLFD_MN = "SLFD_MN"


def slfd_named(s2, s4, s5, w0) -> dict:
    """Six-level coefficients for the orthogonal matrix and constant source."""
    return {
        "alpha1": (w0 - 1) * s4 + 1,
        "alpha2": 1 - s5 / 4 - s2 / 2 - s4 * w0 / 4,
        "beta1": (s4 * w0 + s5 - 2) * (1 - s2),
        "beta2": ((s5 + 2 * s2 - 4) * (1 - s4) + w0 * s4 * (s5 + 2 * s2 - 3)) / 4,
        "beta3": (2 - s2 - s4 * w0) * (s2 + s5 - 2) / 4,
        "gamma1": s4 * w0 * (s2 - 1) * (s5 - 1) + (1 - s4) * (s5 - 2) * (s2 - 1),
        "gamma2": (s2 - 1) * (s4 * w0 * (3 - s2 - 2 * s5) + (2 * s2 + 3 * s5 - s2 * s5 - 4)) / 4,
        "gamma3": (w0 * s4 * (s2 - 1) * (s2 + s5 - 2) + (1 - s4) * (s2 - 2) * (s2 + s5 - 2)) / 4,
        "zeta1": (w0 * s4 - 1) * (1 - s5) * (s2 - 1) ** 2,
        "zeta2": (s4 * w0 * (s2 - 1) ** 2 * (s5 - 1)
                  + (1 - s4) * (1 - s2) * (2 * s2 + 3 * s5 - s2 * s5 - 4)) / 4,
        "eta": (1 - s2) ** 2 * (1 - s4) * (1 - s5),
        "delta": s2**2 * s4 * s5,
    }


def flfd_named(s2, s4, w0) -> dict:
    """Five-level coefficients (the s5 = 1 member of the six-level family)."""
    return {
        "alpha1": (w0 - 1) * s4 + 1,
        "alpha2": (3 - 2 * s2 - s4 * w0) / 4,
        "beta1": (s4 * w0 - 1) * (1 - s2),
        "beta2": ((2 * s2 - 3) * (1 - s4) + 2 * w0 * s4 * (s2 - 1)) / 4,
        "beta3": (2 - s2 - s4 * w0) * (s2 - 1) / 4,
        "gamma1": (1 - s4) * (1 - s2),
        "gamma2": (1 - s4 * w0) * (1 - s2) ** 2 / 4,
        "gamma3": (w0 * s4 * (s2 - 1) ** 2 + (1 - s4) * (s2 - 2) * (s2 - 1)) / 4,
        "zeta1": 0 * s2,
        "zeta2": (s4 - 1) * (1 - s2) ** 2 / 4,
        "eta": 0 * s2,
        "delta": s2**2 * s4,
    }


def slfd_al_named(s2, s4, s5, w0, zdt) -> dict:
    """Six-level coefficients for the linear-source model (barred set)."""
    p = slfd_named(s2, s4, s5, w0)
    f = 2 / (2 - zdt)
    return {
        "alpha1": f * (p["alpha1"] - zdt / 2 * (w0 * (s4 - 2) + 1 - s4)),
        "alpha2": f * (p["alpha2"] - zdt / 8 * (2 - 2 * s2 - s5 + w0 * (2 - s4))),
        "beta1": f * (p["beta1"] + zdt / 8 * (4 * w0 * (s2 - 1) * (s4 - 2) + 4 * s5 * (s2 - 1))),
        "beta2": f * (p["beta2"] + zdt / 8 * ((s4 - 1) * (2 * s2 + s5 - 2)
                                              - w0 * (s4 - 2) * (2 * s2 + s5 - 3))),
        "beta3": f * (p["beta3"] + zdt / 8 * (w0 * (s4 - 2) * (s2 + s5 - 2) + s2 * (s2 + s5 - 2))),
        "gamma1": f * (p["gamma1"] + zdt / 8 * (4 * s5 * (s2 - 1) * (s4 - 1)
                                                - 4 * w0 * (s2 - 1) * (s4 - 2) * (s5 - 1))),
        "gamma2": f * (p["gamma2"] + zdt / 8 * ((s2 - 1) * (s5 + s2 * s5 - 2)
                                                + w0 * (s2 - 1) * (s4 - 2) * (s2 + 2 * s5 - 3))),
        "gamma3": f * (p["gamma3"] + zdt / 8 * (s2 * (s4 - 1) * (s2 + s5 - 2)
                                                - w0 * (s2 - 1) * (s4 - 2) * (s2 + s5 - 2))),
        "zeta1": f * (p["zeta1"] - zdt * (1 - s2) / 8 * (4 * (1 - s2) * (1 - s5)
                                                        + 4 * w0 * (s2 - 1) * (s4 - 2) * (s5 - 1))),
        "zeta2": f * (p["zeta2"] - zdt * (1 - s2) / 8 * ((s4 - 1) * (s5 + s2 * s5 - 2)
                                                        - w0 * (s2 - 1) * (s4 - 2) * (s5 - 1))),
        "eta": f * (p["eta"] + zdt / 2 * (s2 - 1) ** 2 * (s4 - 1) * (s5 - 1)),
        "delta": f * p["delta"],
    }


def slfd_mn_named(s2, s4, s5, w0) -> dict:
    """Six-level coefficients for the natural matrix with diagonal S.

    x- and y-neighbour weights differ unless s4 == s5.
    """
    w1 = (1 - w0) / 4
    return {
        "alpha1": 1 - 2 * w1 * (s4 + s5),
        "alpha2": -(s2 + s4 - 2) / 2 + w1 * s4,
        "alpha3": -(s2 + s5 - 2) / 2 + w1 * s5,
        "beta1": (s4 + s5 - 2) * (1 - s2) - 2 * w1 * (1 - s2) * (s4 + s5),
        "beta2": (s2 + s4 - 2) / 2 + s4 * w1 * (1 - s2) - s5 * w1 * (s2 + s4 - 2),
        "beta3": (s2 + s5 - 2) / 2 + s5 * w1 * (1 - s2) - s4 * w1 * (s2 + s5 - 2),
        "beta4": -(s2 + s4 - 2) * (s2 + s5 - 2) / 4
                 + (s4 * w1 * (s2 + s5 - 2) + s5 * w1 * (s2 + s4 - 2)) / 2,
        "gamma1": (s2 - 1) * (s4 + s5 - 2) - 2 * w1 * (s2 - 1) * (2 * s4 * s5 - s4 - s5),
        "gamma2": -(s2 - 1) * (s5 - 1) * (s2 + s4 - 2) / 2
                  + w1 * (s2 - 1) * (s4 * (s5 - 1) + s5 * (s2 + s4 - 2)),
        "gamma3": -(s2 - 1) * (s4 - 1) * (s2 + s5 - 2) / 2
                  + w1 * (s2 - 1) * (s5 * (s4 - 1) + s4 * (s2 + s5 - 2)),
        "gamma4": (s2 + s4 - 2) * (s2 + s5 - 2) / 4
                  + w1 * (1 - s2) * (s4 * (s2 + s5 - 2) / 2 + s5 * (s2 + s4 - 2) / 2),
        "zeta1": -(s2 - 1) ** 2 * (s4 - 1) * (s5 - 1) + 2 * w1 * (s2 - 1) ** 2 * (2 * s4 * s5 - s4 - s5),
        "zeta2": (s2 - 1) * (s5 - 1) * (s2 + s4 - 2) / 2 - w1 * s4 * (s2 - 1) ** 2 * (s5 - 1),
        "zeta3": (s2 - 1) * (s4 - 1) * (s2 + s5 - 2) / 2 - w1 * s5 * (s2 - 1) ** 2 * (s4 - 1),
        "eta": (s2 - 1) ** 2 * (s4 - 1) * (s5 - 1),
        "delta": s2**2 * s4 * s5,
    }


# (center, x-pair, y-pair, diagonal) names per level n, n-1, ..., n-4.
_LAYOUT_ISO = [
    ("alpha1", "alpha2", "alpha2", None),
    ("beta1", "beta2", "beta2", "beta3"),
    ("gamma1", "gamma2", "gamma2", "gamma3"),
    ("zeta1", "zeta2", "zeta2", None),
    ("eta", None, None, None),
]
_LAYOUT_MN = [
    ("alpha1", "alpha2", "alpha3", None),
    ("beta1", "beta2", "beta3", "beta4"),
    ("gamma1", "gamma2", "gamma3", "gamma4"),
    ("zeta1", "zeta2", "zeta3", None),
    ("eta", None, None, None),
]


@dataclass(frozen=True)
class StencilCoefficients:
    """Named stencil weights of one scheme plus their per-level layout."""

    scheme_kind: SchemeKind
    named: dict
    source_prefactor: float = 1.0

    @property
    def depth(self) -> int:
        """Number of past levels read by one step."""
        return 4 if self.scheme_kind is SchemeKind.FLFD else 5

    @property
    def delta(self) -> float:
        return self.named["delta"]

    def layout(self) -> np.ndarray:
        """Array ``w[k, m]``: level n-k, slot m in (center, x-pair, y-pair, diagonal)."""
        names = _LAYOUT_MN if self.scheme_kind is SchemeKind.SLFD_MN else _LAYOUT_ISO
        out = np.zeros((5, 4))
        for k, row in enumerate(names):
            for m, name in enumerate(row):
                if name is not None:
                    out[k, m] = self.named[name]
        return out

    def weight_sum(self) -> float:
        """Sum of every phi weight times its stencil multiplicity."""
        return float((self.layout() * np.array([1.0, 2.0, 2.0, 4.0])).sum())

    def to_csv(self, path, header: str | None = None) -> None:
        with open(path, "w", newline="") as fh:
            if header:
                fh.write(f"# {header}\n")
            wr = csv.writer(fh)
            wr.writerow(["name", "value"])
            for k, v in self.named.items():
                wr.writerow([k, f"{float(v):.17e}"])


def build_coefficients(rset: RelaxationSet, scheme_kind, zeta: float = 0.0,
                       dt: float = 0.0, tol: float = 1e-12) -> StencilCoefficients:
    """Closed-form stencil coefficients for ``scheme_kind``.

    Raises:
        SchemeMismatch: FLFD with s5 != 1, SLFD_MN with an orthogonal set, or
            an orthogonal-matrix scheme with a natural set.
    """
    kind = SchemeKind(scheme_kind)
    s2, s4, s5, w0 = rset.s2, rset.s4, rset.s5, rset.w0
    if kind is SchemeKind.SLFD_MN:
        if rset.matrix_kind is not MatrixKind.NATURAL:
            raise SchemeMismatch("SLFD_MN needs a natural-matrix parameter set")
        return StencilCoefficients(kind, slfd_mn_named(s2, s4, s5, w0))
    if rset.matrix_kind is not MatrixKind.ORTHOGONAL:
        raise SchemeMismatch(f"{kind.value} needs an orthogonal-matrix parameter set")
    if kind is SchemeKind.FLFD:
        if abs(s5 - 1.0) > tol:
            raise SchemeMismatch(f"FLFD requires s5 = 1, got {s5!r}")
        return StencilCoefficients(kind, flfd_named(s2, s4, w0))
    if kind is SchemeKind.SLFD:
        return StencilCoefficients(kind, slfd_named(s2, s4, s5, w0))
    zdt = zeta * dt
    if zdt == 2.0:
        raise SchemeMismatch("zeta*dt = 2 is degenerate")
    return StencilCoefficients(kind, slfd_al_named(s2, s4, s5, w0, zdt), 2.0 / (2.0 - zdt))


@dataclass
class ScalarHistory:
    """Ring buffer of the most recent scalar fields, newest last."""

    depth: int
    shape: tuple
    _data: np.ndarray = field(init=False, repr=False)
    _count: int = field(default=0, init=False)
    _head: int = field(default=-1, init=False)

    def __post_init__(self):
        if not 1 <= self.depth <= 5:
            raise ValueError("depth must lie in 1..5")
        self._data = np.zeros((self.depth,) + tuple(self.shape))

    def push(self, phi: np.ndarray) -> None:
        if phi.shape != tuple(self.shape):
            raise ShapeMismatch(f"field shape {phi.shape} != history shape {tuple(self.shape)}")
        self._head = (self._head + 1) % self.depth
        self._data[self._head] = phi
        self._count = min(self._count + 1, self.depth)

    def __len__(self) -> int:
        return self._count

    @property
    def full(self) -> bool:
        return self._count == self.depth

    def level(self, k: int) -> np.ndarray:
        """Field k steps in the past (k = 0 is the newest), read-only view."""
        if k >= self._count:
            raise HistoryUnderflow(f"level n-{k} requested with {self._count} stored")
        v = self._data[(self._head - k) % self.depth].view()
        v.flags.writeable = False
        return v

    def newest(self) -> np.ndarray:
        return self.level(0)


def _stencil_sums(phi: np.ndarray, periodic: bool):
    """(center, x-pair, y-pair, diagonal) neighbour sums.

    Periodic fields wrap; otherwise sums are for interior nodes only.
    """
    if periodic:
        xp = np.roll(phi, -1, 0) + np.roll(phi, 1, 0)
        yp = np.roll(phi, -1, 1) + np.roll(phi, 1, 1)
        dg = np.roll(yp, -1, 0) + np.roll(yp, 1, 0)
        return phi, xp, yp, dg
    c = phi[1:-1, 1:-1]
    xp = phi[2:, 1:-1] + phi[:-2, 1:-1]
    yp = phi[1:-1, 2:] + phi[1:-1, :-2]
    dg = phi[2:, 2:] + phi[2:, :-2] + phi[:-2, 2:] + phi[:-2, :-2]
    return c, xp, yp, dg


def fd_step(history: ScalarHistory, coeffs: StencilCoefficients, source: float, dt: float,
            periodic: bool = True, boundary: Callable[[], np.ndarray] | None = None) -> np.ndarray:
    """Evaluate the stencil once and return phi^{n+1}.

    Args:
        history: Past fields, newest last.
        coeffs: Scheme coefficients.
        source: Constant source R.
        dt: Time step.
        periodic: Wrap neighbours; otherwise only interior nodes are updated.
        boundary: For non-periodic problems, returns the full field of exact
            boundary values at the new time (interior entries are ignored).

    Raises:
        HistoryUnderflow: If fewer past levels are stored than the scheme reads.
    """
    depth = coeffs.depth
    if len(history) < depth:
        raise HistoryUnderflow(f"{coeffs.scheme_kind.value} needs {depth} levels, "
                               f"history holds {len(history)}")
    w = coeffs.layout()
    acc = None
    for k in range(depth):
        parts = _stencil_sums(history.level(k), periodic)
        for m in range(4):
            if w[k, m] != 0.0:
                term = w[k, m] * parts[m]
                acc = term if acc is None else acc + term
    acc = acc + dt * coeffs.delta * source
    if periodic:
        return acc
    if boundary is None:
        raise SchemeMismatch("non-periodic step needs boundary values")
    out = np.array(boundary(), dtype=float, copy=True)
    out[1:-1, 1:-1] = acc
    return out


class FDSolver:
    """Drives a multi-level scheme on one lattice.

    Args:
        problem: Diffusion problem.
        disc: Lattice.
        coeffs: Stencil coefficients.
        boundary_values: For Dirichlet problems, t -> full field whose edge
            entries hold the boundary values.
    """

    def __init__(self, problem: DiffusionProblem, disc: Discretization,
                 coeffs: StencilCoefficients, boundary_values=None):
        self.problem = problem
        self.disc = disc
        self.coeffs = coeffs
        self.boundary_values = boundary_values
        self.history = ScalarHistory(coeffs.depth, (disc.nx, disc.ny))
        self.n = -1

    def load(self, fields) -> None:
        """Push initial levels phi^0, phi^1, ... (oldest first)."""
        for phi in fields:
            self.history.push(np.asarray(phi, dtype=float))
            self.n += 1

    def step(self) -> np.ndarray:
        t_new = (self.n + 1) * self.disc.dt
        bnd = None
        if not self.problem.periodic:
            if self.boundary_values is None:
                raise SchemeMismatch("Dirichlet problem without boundary values")
            bnd = lambda: self.boundary_values(t_new)  # noqa: E731
        phi = fd_step(self.history, self.coeffs, self.problem.source_const, self.disc.dt,
                      periodic=self.problem.periodic, boundary=bnd)
        self.history.push(phi)
        self.n += 1
        return phi

    def run_to(self, n_final: int, callback=None) -> np.ndarray:
        while self.n < n_final:
            phi = self.step()
            if callback is not None:
                callback(self.n, phi)
        return self.history.newest()


def bootstrap(solver: FDSolver, strategy: str = "analytic", solution=None, lb_model=None,
              lb_field=None) -> FDSolver:
    """Fill the history of ``solver`` with its first ``depth`` time levels.

    Args:
        solver: Freshly created solver.
        strategy: ``"analytic"`` samples ``solution(x, y, t)``;
            ``"lb_bootstrap"`` runs the LB model from ``lb_field``.
        solution: Callable phi(X, Y, t) on meshgrids, for the analytic strategy.
        lb_model: An LB model on the same lattice, for the LB strategy.
        lb_field: Its initial populations.

    Raises:
        NoAnalyticSolution: analytic strategy without a solution.
    """
    depth = solver.coeffs.depth
    if strategy == "analytic":
        if solution is None:
            raise NoAnalyticSolution("analytic bootstrap needs a closed-form solution")
        x, y = solver.disc.coordinates(solver.problem)
        xx, yy = np.meshgrid(x, y, indexing="ij")
        solver.load(solution(xx, yy, k * solver.disc.dt) for k in range(depth))
    elif strategy == "lb_bootstrap":
        if lb_model is None or lb_field is None:
            raise SchemeMismatch("lb_bootstrap needs an LB model and initial populations")
        fields = [lb_model.macroscopic(lb_field.f)]
        fld = lb_field
        for _ in range(depth - 1):
            fld = lb_model.step(fld)
            fields.append(lb_model.macroscopic(fld.f))
        solver.load(fields)
    else:
        raise ValueError(f"unknown bootstrap strategy {strategy!r}")
    return solver
