"""D2Q5 multiple-relaxation-time lattice Boltzmann stepper.

Populations are stored structure-of-arrays as ``f[i, ix, iy]``. Collision is
carried out in moment space and streaming is an index shift into a second
buffer. Periodic problems wrap; Dirichlet problems reconstruct the populations
entering the domain from the boundary data.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BoundaryError, ShapeMismatch, SingularRelaxation
from .params import (
    DiffusionProblem,
    Discretization,
    MatrixKind,
    RelaxationSet,
    source_scale,
)

#: Integer velocity offsets c_i / c.
VELOCITIES = np.array([[0, 0], [1, 0], [0, 1], [-1, 0], [0, -1]], dtype=int)
#: Index of the velocity opposite to each velocity.
OPPOSITE = np.array([0, 3, 4, 1, 2])
Q = 5


def orthogonal_matrix(c: float = 1.0) -> np.ndarray:
    """Orthogonal D2Q5 transform matrix M."""
    c2 = c * c
    return np.array(
        [
            [1.0, 1.0, 1.0, 1.0, 1.0],
            [0.0, c, 0.0, -c, 0.0],
            [0.0, 0.0, c, 0.0, -c],
            [-4.0 * c2, c2, c2, c2, c2],
            [0.0, c2, -c2, c2, -c2],
        ]
    )


def natural_matrix(c: float = 1.0) -> np.ndarray:
    """Natural D2Q5 transform matrix M_N (raw velocity moments)."""
    c2 = c * c
    return np.array(
        [
            [1.0, 1.0, 1.0, 1.0, 1.0],
            [0.0, c, 0.0, -c, 0.0],
            [0.0, 0.0, c, 0.0, -c],
            [0.0, c2, 0.0, c2, 0.0],
            [0.0, 0.0, c2, 0.0, c2],
        ]
    )


@dataclass(frozen=True)
class TransformMatrix:
    """A moment transform with its inverse."""

    matrix: np.ndarray
    inverse: np.ndarray
    kind: MatrixKind

    @classmethod
    def build(cls, kind: MatrixKind | str = MatrixKind.ORTHOGONAL, c: float = 1.0):
        kind = MatrixKind(kind)
        m = orthogonal_matrix(c) if kind is MatrixKind.ORTHOGONAL else natural_matrix(c)
        return cls(matrix=m, inverse=np.linalg.inv(m), kind=kind)


def relaxation_matrix(rset: RelaxationSet) -> np.ndarray:
    """Diagonal relaxation matrix diag(s1, s2, s2, s4, s5)."""
    return np.diag(rset.rates())


def natural_relaxation_matrix(rset: RelaxationSet, c: float = 1.0) -> np.ndarray:
    """S_N = M_N M^-1 S M M_N^-1, the orthogonal-family S seen in the natural basis."""
    m = orthogonal_matrix(c)
    mn = natural_matrix(c)
    return mn @ np.linalg.solve(m, relaxation_matrix(rset)) @ m @ np.linalg.inv(mn)


def equilibrium(phi, weights) -> np.ndarray:
    """Equilibrium populations w_i * phi, stacked along a new leading axis."""
    w = np.asarray(weights, dtype=float).reshape((Q,) + (1,) * np.ndim(phi))
    return w * np.asarray(phi, dtype=float)


@dataclass
class Jet:
    """Value and low-order space-time derivatives of phi at a set of points.

    Missing time derivatives are filled from the governing equation by
    :meth:`complete`.
    """

    phi: np.ndarray
    x: np.ndarray
    y: np.ndarray
    xx: np.ndarray
    xy: np.ndarray
    yy: np.ndarray
    t: np.ndarray | None = None
    tt: np.ndarray | None = None
    tx: np.ndarray | None = None
    ty: np.ndarray | None = None

    def complete(self, problem: DiffusionProblem) -> "Jet":
        """Return a copy whose d_t phi comes from the equation."""
        lap = self.xx + self.yy
        t = problem.kappa * lap + problem.source_linear * self.phi + problem.source_const
        return Jet(self.phi, self.x, self.y, self.xx, self.xy, self.yy, t, self.tt, self.tx, self.ty)

    def take(self, index) -> "Jet":
        sel = {}
        for name in ("phi", "x", "y", "xx", "xy", "yy", "t", "tt", "tx", "ty"):
            v = getattr(self, name)
            sel[name] = None if v is None else np.asarray(v)[index]
        return Jet(**sel)


#: Supplies the jet of phi at boundary points (xs, ys) and time t.
BoundaryData = Callable[[np.ndarray, np.ndarray, float], Jet]


@dataclass
class DistributionField:
    """LB state: populations, step counter and the parameters they belong to."""

    f: np.ndarray
    n: int
    disc: Discretization
    rset: RelaxationSet

    def __post_init__(self):
        if self.f.shape != (Q, self.disc.nx, self.disc.ny):
            raise ShapeMismatch(f"populations have shape {self.f.shape}, expected "
                                f"{(Q, self.disc.nx, self.disc.ny)}")

    @property
    def time(self) -> float:
        return self.n * self.disc.dt

    def copy(self) -> "DistributionField":
        return DistributionField(self.f.copy(), self.n, self.disc, self.rset)


@dataclass
class LBModel:
    """Collision/streaming engine for one problem, lattice and parameter set.

    Args:
        problem: The diffusion problem (sources, boundary kind).
        disc: Lattice.
        rset: Relaxation rates and weights.
        transform: Moment basis; defaults to ``rset.matrix_kind``.
        relaxation: Explicit relaxation matrix in that basis; defaults to the
            diagonal matrix of ``rset``.
        boundary: Dirichlet jet supplier, required for Dirichlet problems.
        conserve_moment: Pin the conserved moment of reconstructed populations
            (initialization and boundary closure) to its exact value.
        closure: Dirichlet closure for incoming populations. All variants
            start from the second-order reconstruction formula.
            ``"reconstruct"`` stops there; ``"edges"`` then corrects the
            single unknown on edge nodes so the node carries the prescribed
            value; ``"all"`` also corrects both unknowns at corners, splitting
            the residual equally.
    """

    problem: DiffusionProblem
    disc: Discretization
    rset: RelaxationSet
    transform: TransformMatrix | None = None
    relaxation: np.ndarray | None = None
    boundary: BoundaryData | None = None
    conserve_moment: bool = True
    closure: str = "all"

    def __post_init__(self):
        if self.closure not in CLOSURES:
            raise BoundaryError(f"unknown closure {self.closure!r}; expected one of {CLOSURES}")
        c = self.disc.c
        if self.transform is None:
            self.transform = TransformMatrix.build(self.rset.matrix_kind, c)
        if self.relaxation is None:
            self.relaxation = relaxation_matrix(self.rset)
        self.weights = np.array(self.rset.weights)
        self.scale = source_scale(self.problem.source_linear, self.disc.dt)
        m, s = self.transform.matrix, self.relaxation
        eye = np.eye(Q)
        self._m = m
        self._minv = self.transform.inverse
        self._keep = eye - s
        self._meq = m @ self.weights
        self._s_meq = s @ self._meq
        self._src = self.disc.dt * (eye - 0.5 * s) @ self._meq
        # Population-space operators for the reconstruction formulas.
        self._lam = self._minv @ s @ m
        singular = np.any(np.array(self.rset.rates()) == 0.0) or np.linalg.matrix_rank(s) < Q
        self._lam_inv = None if singular else np.linalg.inv(self._lam)

    # -- macroscopic extraction -------------------------------------------------
    def macroscopic(self, f: np.ndarray) -> np.ndarray:
        """phi = (sum_i f_i + dt R/2) / (1 - zeta dt/2)."""
        return (f.sum(axis=0) + 0.5 * self.disc.dt * self.problem.source_const) / self.scale

    # -- one lattice update -----------------------------------------------------
    def collide(self, f: np.ndarray) -> np.ndarray:
        """Post-collision populations, computed in moment space."""
        phi = self.macroscopic(f)
        shape = f.shape
        flat = f.reshape(Q, -1)
        mom = self._m @ flat
        src = self.problem.source_linear * phi + self.problem.source_const
        post = self._keep @ mom + np.outer(self._s_meq, phi.ravel()) + np.outer(self._src, np.broadcast_to(src, phi.shape).ravel())
        return (self._minv @ post).reshape(shape)

    def stream(self, fpost: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
        """Shift every population along its velocity (periodic wrap)."""
        if out is None:
            out = np.empty_like(fpost)
        out[0] = fpost[0]
        for i in range(1, Q):
            cx, cy = VELOCITIES[i]
            out[i] = np.roll(fpost[i], shift=(cx, cy), axis=(0, 1))
        return out

    def step(self, field: DistributionField) -> DistributionField:
        """Advance the field by one time step (collision, streaming, closure)."""
        if not self.problem.periodic and self.boundary is None:
            raise BoundaryError("Dirichlet problem without boundary data")
        post = self.collide(field.f)
        new = self.stream(post)
        n = field.n + 1
        if not self.problem.periodic:
            self.close_boundary(new, n * self.disc.dt)
        return DistributionField(new, n, field.disc, field.rset)

    def run(self, field: DistributionField, steps: int, callback=None) -> DistributionField:
        for _ in range(steps):
            field = self.step(field)
            if callback is not None:
                callback(field)
        return field

    # -- reconstruction formulas -------------------------------------------------
    def _require_invertible(self):
        if self._lam_inv is None:
            raise SingularRelaxation("relaxation matrix has a zero rate")

    def reconstruct(self, jet: Jet, second_order: bool = False) -> np.ndarray:
        """Populations built from a jet of phi by the Chapman-Enskog-type formula.

        f = feq - dt L^-1 D feq + dt L^-1 (I - L/2) R~
            [+ dt^2 L^-1 D (I - L/2) L^-1 D feq]
        with L = M^-1 S M and D_i = d_t + c_i . grad.
        """
        self._require_invertible()
        dt = self.disc.dt
        c = self.disc.c
        w = self.weights
        jet = jet if jet.t is not None else jet.complete(self.problem)
        phi = np.asarray(jet.phi, dtype=float)
        cvec = c * VELOCITIES.astype(float)
        feq = equilibrium(phi, w)
        # D_i feq_i = w_i (phi_t + c_i . grad phi)
        dfeq = np.stack([w[i] * (jet.t + cvec[i, 0] * jet.x + cvec[i, 1] * jet.y) for i in range(Q)])
        rt = equilibrium(self.problem.source_linear * phi + self.problem.source_const, w)
        eye = np.eye(Q)
        li = self._lam_inv
        f = feq - dt * np.tensordot(li, dfeq, axes=1) + dt * np.tensordot(li @ (eye - 0.5 * self._lam), rt, axes=1)
        if second_order:
            if jet.tt is None or jet.tx is None or jet.ty is None:
                raise BoundaryError("second-order reconstruction needs d_tt, d_tx and d_ty of phi")
            b = (eye - 0.5 * self._lam) @ li
            inner = np.zeros_like(f)
            for i in range(Q):
                ci = cvec[i]
                for j in range(Q):
                    if b[i, j] == 0.0:
                        continue
                    cj = cvec[j]
                    # D_i D_j phi
                    dij = (jet.tt + (ci[0] + cj[0]) * jet.tx + (ci[1] + cj[1]) * jet.ty
                           + ci[0] * cj[0] * jet.xx + (ci[0] * cj[1] + ci[1] * cj[0]) * jet.xy
                           + ci[1] * cj[1] * jet.yy)
                    inner[i] += b[i, j] * w[j] * dij
            f = f + dt * dt * np.tensordot(li, inner, axes=1)
        if self.conserve_moment:
            # The conserved moment has no non-equilibrium part beyond the source shift.
            target = phi * self.scale - 0.5 * dt * self.problem.source_const
            f = f + (target - f.sum(axis=0)) / Q
        return f

    def initialize(self, jet: Jet) -> DistributionField:
        """Fourth-order initial populations from phi0 and its spatial derivatives."""
        f = self.reconstruct(jet.complete(self.problem), second_order=False)
        if f.shape != (Q, self.disc.nx, self.disc.ny):
            raise ShapeMismatch(f"initial data shape {f.shape[1:]} does not match lattice")
        return DistributionField(np.ascontiguousarray(f), 0, self.disc, self.rset)

    def equilibrium_field(self, phi: np.ndarray) -> DistributionField:
        return DistributionField(equilibrium(phi, self.weights), 0, self.disc, self.rset)

    # -- Dirichlet closure --------------------------------------------------------
    def boundary_nodes(self):
        """Unknown-population mask per boundary node after streaming.

        Returns:
            (ix, iy, mask) where mask[k, i] is True if population i at node k
            streamed in from outside the domain.
        """
        nx, ny = self.disc.nx, self.disc.ny
        ix, iy = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
        on = (ix == 0) | (ix == nx - 1) | (iy == 0) | (iy == ny - 1)
        ix, iy = ix[on], iy[on]
        mask = np.zeros((ix.size, Q), dtype=bool)
        mask[:, 1] = ix == 0
        mask[:, 3] = ix == nx - 1
        mask[:, 2] = iy == 0
        mask[:, 4] = iy == ny - 1
        return ix, iy, mask

    def close_boundary(self, f: np.ndarray, t: float) -> np.ndarray:
        """Overwrite incoming populations on the boundary with the closure formula."""
        if self.boundary is None:
            raise BoundaryError("no boundary data registered")
        if not hasattr(self, "_bnodes"):
            self._bnodes = self.boundary_nodes()
        ix, iy, mask = self._bnodes
        x = self.disc.dx * ix
        y = self.disc.dx * iy
        jet = self.boundary(x + _origin(self.problem)[0], y + _origin(self.problem)[1], t)
        if any(getattr(jet, k) is None for k in ("tt", "tx", "ty")):
            raise BoundaryError("boundary data must supply d_tt, d_tx and d_ty")
        if jet.t is None:
            jet = jet.complete(self.problem)
        saved = self.conserve_moment
        self.conserve_moment = False
        try:
            fb = self.reconstruct(jet, second_order=True)
        finally:
            self.conserve_moment = saved
        if self.conserve_moment:
            fb = self._pin_moment(fb, jet.phi)
        for i in range(1, Q):
            sel = mask[:, i]
            f[i, ix[sel], iy[sel]] = fb[i, sel]
        if self.closure != "reconstruct":
            count = mask.sum(axis=1)
            fix = count == 1 if self.closure == "edges" else count >= 1
            target = jet.phi * self.scale - 0.5 * self.disc.dt * self.problem.source_const
            resid = (target - f[:, ix, iy].sum(axis=0)) / np.maximum(count, 1)
            for i in range(1, Q):
                sel = mask[:, i] & fix
                f[i, ix[sel], iy[sel]] += resid[sel]
        return f

    def _pin_moment(self, fb: np.ndarray, phi: np.ndarray) -> np.ndarray:
        target = phi * self.scale - 0.5 * self.disc.dt * self.problem.source_const
        return fb + (target - fb.sum(axis=0)) / Q


CLOSURES = ("edges", "reconstruct", "all")


def _origin(problem: DiffusionProblem):
    return problem.x0, problem.y0
