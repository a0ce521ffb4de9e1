"""Analytic benchmark problems, error norms, convergence studies and
scheme-equivalence checks."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import mpmath
import numpy as np

from .errors import ShapeMismatch
from .kinetic import Jet, LBModel
from .macro_fd import FDSolver, SchemeKind, bootstrap, build_coefficients
from .params import (
    BoundaryKind,
    DiffusionProblem,
    Discretization,
    RelaxationSet,
    derive_fourth_order,
    derive_fourth_order_natural,
    derive_linear_source_natural,
    derive_linear_source_v1,
    derive_linear_source_v2,
)

PI = math.pi


# --------------------------------------------------------------------------
# Analytic solutions
# --------------------------------------------------------------------------
@dataclass(frozen=True)
class AnalyticSolution:
    """Closed-form solution of one benchmark problem.

    Attributes:
        name: Identifier (``example1``, ``example2``, ``example3``).
        problem: The diffusion problem it solves.
        phi: Evaluator phi(x, y, t).
        jet: Evaluator of value and first/second space-time derivatives.
        phi_mp: Scalar evaluator of phi in mpmath arithmetic.
    """

    name: str
    problem: DiffusionProblem
    phi: Callable
    jet: Callable
    phi_mp: Callable

    def residual(self, x, y, t, h: float = 1e-6, dps: int = 40) -> np.ndarray:
        """PDE residual from fourth-order central differences in ``dps``-digit arithmetic."""
        pr = self.problem
        kappa, zeta, src = (mpmath.mpf(v) for v in (pr.kappa, pr.source_linear, pr.source_const))
        x, y, t = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (x, y, t)))
        out = np.empty(x.shape)
        with mpmath.workdps(dps):
            hh = mpmath.mpf(h)
            for i in np.ndindex(x.shape):
                xi, yi, ti = (mpmath.mpf(float(a[i])) for a in (x, y, t))
                p = self.phi_mp
                c = p(xi, yi, ti)
                pt = (8 * (p(xi, yi, ti + hh) - p(xi, yi, ti - hh))
                      - (p(xi, yi, ti + 2 * hh) - p(xi, yi, ti - 2 * hh))) / (12 * hh)
                lap = (16 * (p(xi + hh, yi, ti) + p(xi - hh, yi, ti)
                             + p(xi, yi + hh, ti) + p(xi, yi - hh, ti))
                       - (p(xi + 2 * hh, yi, ti) + p(xi - 2 * hh, yi, ti)
                          + p(xi, yi + 2 * hh, ti) + p(xi, yi - 2 * hh, ti))
                       - 60 * c) / (12 * hh * hh)
                out[i] = float(pt - kappa * lap - zeta * c - src)
        return out


def example1(kappa: float) -> AnalyticSolution:
    """Periodic [0,2]^2, phi0 = sin(pi x) sin(pi y), constant source pi^2."""
    pb = DiffusionProblem(kappa=kappa, source_const=PI**2, lx=2.0, ly=2.0)
    a = -2.0 * kappa * PI**2

    def phi(x, y, t):
        return np.sin(PI * x) * np.sin(PI * y) * np.exp(a * t) + PI**2 * t

    def jet(x, y, t):
        sx, cx = np.sin(PI * x), np.cos(PI * x)
        sy, cy = np.sin(PI * y), np.cos(PI * y)
        e = np.exp(a * t)
        ss = sx * sy * e
        return Jet(
            phi=ss + PI**2 * t,
            x=PI * cx * sy * e, y=PI * sx * cy * e,
            xx=-PI**2 * ss, xy=PI**2 * cx * cy * e, yy=-PI**2 * ss,
            t=a * ss + PI**2, tt=a * a * ss,
            tx=a * PI * cx * sy * e, ty=a * PI * sx * cy * e,
        )

    def phi_mp(x, y, t):
        pi = mpmath.pi
        return (mpmath.sin(pi * x) * mpmath.sin(pi * y) * mpmath.exp(-2 * mpmath.mpf(kappa) * pi**2 * t)
                + pi**2 * t)

    return AnalyticSolution("example1", pb, phi, jet, phi_mp)


def example2(kappa: float) -> AnalyticSolution:
    """Dirichlet [0,1]^2 with phi = exp(-(x + y) + 2 kappa t)."""
    pb = DiffusionProblem(kappa=kappa, lx=1.0, ly=1.0, boundary_kind=BoundaryKind.DIRICHLET)
    k2 = 2.0 * kappa

    def phi(x, y, t):
        return np.exp(-(x + y) + k2 * t)

    def jet(x, y, t):
        p = phi(x, y, t)
        return Jet(phi=p, x=-p, y=-p, xx=p, xy=p, yy=p, t=k2 * p, tt=k2 * k2 * p,
                   tx=-k2 * p, ty=-k2 * p)

    def phi_mp(x, y, t):
        return mpmath.exp(-(x + y) + 2 * mpmath.mpf(kappa) * t)

    return AnalyticSolution("example2", pb, phi, jet, phi_mp)


def example3(kappa: float) -> AnalyticSolution:
    """Periodic [-1,1]^2 with linear source -pi^2 (1 - kappa) phi."""
    zeta = -PI**2 * (1.0 - kappa)
    pb = DiffusionProblem(kappa=kappa, source_linear=zeta, lx=2.0, ly=2.0, x0=-1.0, y0=-1.0)
    a = -PI**2 * (kappa + 1.0)

    def phi(x, y, t):
        return np.sin(PI * x) * np.sin(PI * y) * np.exp(a * t)

    def jet(x, y, t):
        sx, cx = np.sin(PI * x), np.cos(PI * x)
        sy, cy = np.sin(PI * y), np.cos(PI * y)
        e = np.exp(a * t)
        ss = sx * sy * e
        return Jet(
            phi=ss, x=PI * cx * sy * e, y=PI * sx * cy * e,
            xx=-PI**2 * ss, xy=PI**2 * cx * cy * e, yy=-PI**2 * ss,
            t=a * ss, tt=a * a * ss, tx=a * PI * cx * sy * e, ty=a * PI * sx * cy * e,
        )

    def phi_mp(x, y, t):
        pi = mpmath.pi
        return (mpmath.sin(pi * x) * mpmath.sin(pi * y)
                * mpmath.exp(-pi**2 * (mpmath.mpf(kappa) + 1) * t))

    return AnalyticSolution("example3", pb, phi, jet, phi_mp)


EXAMPLES = {"example1": example1, "example2": example2, "example3": example3}


def make_example(name: str, kappa: float) -> AnalyticSolution:
    try:
        return EXAMPLES[name](kappa)
    except KeyError:
        raise ShapeMismatch(f"unknown example {name!r}") from None


# --------------------------------------------------------------------------
# Error norm
# --------------------------------------------------------------------------
def rmse(numeric: np.ndarray, exact: np.ndarray) -> float:
    """Root-mean-square difference over all stored nodes."""
    numeric = np.asarray(numeric, dtype=float)
    exact = np.asarray(exact, dtype=float)
    if numeric.shape != exact.shape:
        raise ShapeMismatch(f"{numeric.shape} vs {exact.shape}")
    return float(np.sqrt(np.mean((numeric - exact) ** 2)))


def convergence_rates(rmses) -> np.ndarray:
    """log2 ratios of successive RMSE values."""
    r = np.asarray(rmses, dtype=float)
    return np.log2(r[:-1] / r[1:])


# --------------------------------------------------------------------------
# Scheme registry
# --------------------------------------------------------------------------
@dataclass(frozen=True)
class SchemeSpec:
    """How one table column is produced.

    Attributes:
        name: Identifier.
        solver: ``"lb"`` or ``"fd"``.
        fd_kind: Stencil family for FD solvers.
        params: (epsilon, problem, dt) -> RelaxationSet.
    """

    name: str
    solver: str
    fd_kind: SchemeKind | None
    params: Callable


def _p_plain(s5):
    return lambda eps, pb, dt: derive_fourth_order(eps, s5)


def _p_al1(eps, pb, dt):
    return derive_linear_source_v1(eps)


def _p_al2(s5):
    return lambda eps, pb, dt: derive_linear_source_v2(eps, s5, pb.source_linear, dt)


SCHEMES = {
    "lb": SchemeSpec("lb", "lb", None, _p_plain(1.0)),
    "flfd": SchemeSpec("flfd", "fd", SchemeKind.FLFD, _p_plain(1.0)),
    "slfd": SchemeSpec("slfd", "fd", SchemeKind.SLFD, _p_plain(1.2)),
    "lb_s5": SchemeSpec("lb_s5", "lb", None, _p_plain(1.2)),
    "lb_natural": SchemeSpec("lb_natural", "lb", None,
                             lambda eps, pb, dt: derive_fourth_order_natural(eps)),
    "slfd_mn": SchemeSpec("slfd_mn", "fd", SchemeKind.SLFD_MN,
                          lambda eps, pb, dt: derive_fourth_order_natural(eps)),
    "lb_al1": SchemeSpec("lb_al1", "lb", None, _p_al1),
    "slfd_al1": SchemeSpec("slfd_al1", "fd", SchemeKind.SLFD_AL, _p_al1),
    "lb_al2": SchemeSpec("lb_al2", "lb", None, _p_al2(1.0)),
    "slfd_al2": SchemeSpec("slfd_al2", "fd", SchemeKind.SLFD_AL, _p_al2(1.0)),
    "lb_al_natural": SchemeSpec("lb_al_natural", "lb", None,
                                lambda eps, pb, dt: derive_linear_source_natural(
                                    eps, pb.source_linear, dt)),
}


# --------------------------------------------------------------------------
# Single runs
# --------------------------------------------------------------------------
@dataclass
class RunResult:
    phi: np.ndarray
    exact: np.ndarray
    rmse: float
    steps: int
    seconds: float


def _mesh(disc: Discretization, pb: DiffusionProblem):
    x, y = disc.coordinates(pb)
    return np.meshgrid(x, y, indexing="ij")


def simulate(scheme: str, example: str, epsilon: float, dx: float, dt: float, t_final: float,
             rset: RelaxationSet | None = None, strategy: str = "analytic",
             snapshots=None, closure: str = "all") -> RunResult:
    """Run one scheme on one benchmark up to ``t_final``.

    Args:
        scheme: Key of :data:`SCHEMES`.
        example: Key of :data:`EXAMPLES`.
        epsilon: kappa*dt/dx**2 (fixes kappa for the given dx, dt).
        dx: Lattice spacing.
        dt: Time step.
        t_final: Final time; must be a whole number of steps.
        rset: Override of the scheme's parameter set.
        strategy: FD history bootstrap (``analytic`` or ``lb_bootstrap``).
        snapshots: Optional dict {step: None} filled in place with phi fields.
        closure: LB Dirichlet closure (see :class:`LBModel`).
    """
    spec = SCHEMES[scheme]
    kappa = epsilon * dx * dx / dt
    sol = make_example(example, kappa)
    pb = sol.problem
    disc = Discretization.for_problem(pb, dx, dt)
    if rset is None:
        rset = spec.params(epsilon, pb, dt)
    steps = round(t_final / dt)
    if abs(steps * dt - t_final) > 1e-9 * max(1.0, t_final):
        raise ValueError(f"t_final={t_final} is not a multiple of dt={dt}")
    xx, yy = _mesh(disc, pb)
    t0 = time.perf_counter()

    def grab(n, phi):
        if snapshots is not None and n in snapshots:
            snapshots[n] = phi.copy()

    if spec.solver == "lb":
        boundary = None if pb.periodic else sol.jet
        lb = LBModel(pb, disc, rset, boundary=boundary, closure=closure)
        fld = lb.initialize(sol.jet(xx, yy, 0.0))
        grab(0, lb.macroscopic(fld.f))
        for n in range(1, steps + 1):
            fld = lb.step(fld)
            if snapshots is not None and n in snapshots:
                grab(n, lb.macroscopic(fld.f))
        phi = lb.macroscopic(fld.f)
    else:
        coeffs = build_coefficients(rset, spec.fd_kind, pb.source_linear, dt)
        bvals = None if pb.periodic else (lambda t: sol.phi(xx, yy, t))
        fd = FDSolver(pb, disc, coeffs, boundary_values=bvals)
        if strategy == "analytic":
            bootstrap(fd, "analytic", solution=sol.phi)
        else:
            lb = LBModel(pb, disc, rset, boundary=None if pb.periodic else sol.jet,
                         closure=closure)
            bootstrap(fd, "lb_bootstrap", lb_model=lb, lb_field=lb.initialize(sol.jet(xx, yy, 0.0)))
        for k in range(fd.n + 1):
            grab(k, fd.history.level(fd.n - k))
        phi = fd.run_to(steps, callback=grab if snapshots is not None else None)
    exact = sol.phi(xx, yy, steps * dt)
    return RunResult(phi, exact, rmse(phi, exact), steps, time.perf_counter() - t0)


# --------------------------------------------------------------------------
# Convergence studies
# --------------------------------------------------------------------------
@dataclass
class ConvergenceReport:
    """RMSE per rung of a diffusive-scaling ladder and the derived rates."""

    scheme: str
    example: str
    epsilon: float
    dxs: list
    dts: list
    rmses: list
    seconds: float = 0.0
    params: dict = field(default_factory=dict)

    @property
    def pairwise(self) -> np.ndarray:
        return convergence_rates(self.rmses)

    @property
    def final_pair(self) -> float:
        return float(self.pairwise[-1])

    @property
    def endpoint(self) -> float:
        """Average rate between the coarsest and finest rungs."""
        return float(np.log2(self.rmses[0] / self.rmses[-1]) / (len(self.rmses) - 1))

    @property
    def lsq_slope(self) -> float:
        """Least-squares slope of log2(RMSE) against log2(dx)."""
        return float(np.polyfit(np.log2(self.dxs), np.log2(self.rmses), 1)[0])

    def rows(self):
        for dx, dt, r in zip(self.dxs, self.dts, self.rmses):
            yield dx, dt, r


def ladder(dx0: float, dt0: float, rungs: int):
    """(dx, dt) pairs halving dx and quartering dt."""
    return [(dx0 / 2**k, dt0 / 4**k) for k in range(rungs)]


def convergence_study(scheme: str, example: str, epsilon: float, dx0: float, dt0: float,
                      t_final: float, rungs: int = 4, rset_fn: Callable | None = None,
                      strategy: str = "analytic", closure: str = "all") -> ConvergenceReport:
    """RMSE ladder at fixed dx**2/dt.

    Args:
        rset_fn: Optional (epsilon, problem, dt) -> RelaxationSet override,
            e.g. a deliberately perturbed set.
        strategy: FD history bootstrap.
        closure: LB Dirichlet closure.
    """
    if rungs < 2:
        raise ValueError("a ladder needs at least two rungs")
    dxs, dts, errs = [], [], []
    t0 = time.perf_counter()
    rset0 = None
    for dx, dt in ladder(dx0, dt0, rungs):
        rset = None
        if rset_fn is not None:
            sol = make_example(example, epsilon * dx * dx / dt)
            rset = rset_fn(epsilon, sol.problem, dt)
        res = simulate(scheme, example, epsilon, dx, dt, t_final, rset=rset, strategy=strategy,
                       closure=closure)
        dxs.append(dx)
        dts.append(dt)
        errs.append(res.rmse)
        if rset0 is None:
            sol = make_example(example, epsilon * dx * dx / dt)
            rset0 = rset or SCHEMES[scheme].params(epsilon, sol.problem, dt)
    return ConvergenceReport(scheme, example, epsilon, dxs, dts, errs,
                             time.perf_counter() - t0, rset0.to_config())


# --------------------------------------------------------------------------
# Equivalence
# --------------------------------------------------------------------------
@dataclass
class EquivalenceReport:
    deviations: np.ndarray
    seconds: float

    @property
    def max_deviation(self) -> float:
        return float(self.deviations.max()) if self.deviations.size else 0.0


def equivalence_check(problem: DiffusionProblem, rset: RelaxationSet, scheme_kind,
                      steps: int, disc: Discretization, phi0: Jet | np.ndarray,
                      lb_kwargs: dict | None = None) -> EquivalenceReport:
    """Step LB and an FD scheme side by side from identical histories.

    The FD history is filled with the first levels of the LB run itself, so
    any deviation measures the scheme identity alone.

    Args:
        phi0: Initial jet (fourth-order initialization) or a plain field
            (equilibrium initialization).
        lb_kwargs: Extra keyword arguments for :class:`LBModel`.
    """
    t0 = time.perf_counter()
    lb = LBModel(problem, disc, rset, **(lb_kwargs or {}))
    coeffs = build_coefficients(rset, scheme_kind, problem.source_linear, disc.dt)
    fld = lb.initialize(phi0) if isinstance(phi0, Jet) else lb.equilibrium_field(np.asarray(phi0))
    fd = FDSolver(problem, disc, coeffs)
    bootstrap(fd, "lb_bootstrap", lb_model=lb, lb_field=fld)
    for _ in range(coeffs.depth - 1):
        fld = lb.step(fld)
    dev = []
    for _ in range(fd.n, steps):
        fld = lb.step(fld)
        dev.append(float(np.abs(fd.step() - lb.macroscopic(fld.f)).max()))
    return EquivalenceReport(np.array(dev), time.perf_counter() - t0)


def example1_equivalence(steps: int, s5: float, n: int = 40, epsilon: float = 0.1,
                         scheme_kind=None) -> EquivalenceReport:
    """LB-vs-FD equivalence on the periodic sine benchmark."""
    dx = 2.0 / n
    dt = dx * dx / 0.1
    sol = example1(epsilon * dx * dx / dt)
    disc = Discretization.for_problem(sol.problem, dx, dt)
    rset = derive_fourth_order(epsilon, s5)
    if scheme_kind is None:
        scheme_kind = SchemeKind.FLFD if s5 == 1.0 else SchemeKind.SLFD
    xx, yy = _mesh(disc, sol.problem)
    return equivalence_check(sol.problem, rset, scheme_kind, steps, disc, sol.jet(xx, yy, 0.0))


# --------------------------------------------------------------------------
# Reference tables
# --------------------------------------------------------------------------
@dataclass(frozen=True)
class TableSpec:
    """One published RMSE/CR table.

    Attributes:
        table_id: Identifier.
        scheme: Key of :data:`SCHEMES`.
        example: Key of :data:`EXAMPLES`.
        dx0: Coarsest spacing.
        dt0: Coarsest time step.
        t_final: Final time.
        rows: {epsilon: (rmse per rung..., cr)}.
    """

    table_id: str
    scheme: str
    example: str
    dx0: float
    dt0: float
    t_final: float
    rows: dict


# Comma-typed decimals in two published cells are read as decimal points.
REFERENCE_TABLES = {
    t.table_id: t
    for t in [
        TableSpec("ex1_lb", "lb", "example1", 0.1, 0.1, 10.0, {
            0.001: (6.7249e-7, 4.3010e-8, 2.7205e-9, 1.7092e-10, 3.9807),
            0.005: (2.7793e-6, 1.7768e-7, 1.1238e-8, 7.0653e-10, 3.6472),
            0.100: (7.3601e-7, 4.6588e-8, 2.9392e-9, 1.8473e-10, 3.9867),
            0.150: (1.5830e-6, 1.0176e-7, 6.4425e-9, 4.0519e-10, 3.9773),
        }),
        TableSpec("ex1_flfd", "flfd", "example1", 0.1, 0.1, 10.0, {
            0.001: (3.5341e-7, 2.3026e-8, 1.4631e-9, 9.2142e-11, 3.9684),
            0.005: (1.4207e-6, 9.2523e-8, 5.8786e-9, 3.7000e-10, 3.9689),
            0.100: (3.9773e-6, 2.5877e-7, 1.6437e-8, 1.0348e-9, 3.9684),
            0.150: (1.2018e-5, 7.7574e-7, 4.9177e-8, 3.0941e-9, 3.9744),
        }),
        TableSpec("ex2_lb", "lb", "example2", 0.1, 0.1, 10.0, {
            0.04: (8.8311e-8, 6.6863e-9, 4.3672e-10, 2.9422e-11, 3.5475),
            0.08: (1.3741e-7, 7.2973e-9, 4.6827e-10, 2.9422e-11, 3.7263),
            0.10: (2.1585e-7, 9.3445e-9, 6.1023e-10, 3.9040e-11, 4.1420),
            0.12: (3.1187e-7, 1.6277e-8, 1.0587e-9, 6.7528e-11, 4.0577),
        }),
        TableSpec("ex2_flfd", "flfd", "example2", 0.1, 0.1, 10.0, {
            0.04: (2.5276e-10, 5.8786e-11, 1.2537e-12, 6.3751e-14, 3.978),
            0.08: (8.9627e-10, 6.6733e-11, 4.3916e-12, 2.6318e-13, 3.9689),
            0.10: (2.8156e-9, 2.0894e-10, 1.3743e-11, 8.3952e-13, 3.9039),
            0.12: (6.6352e-9, 4.9170e-10, 3.2335e-11, 2.0162e-12, 3.8948),
        }),
        TableSpec("ex3_lb_al1", "lb_al1", "example3", 0.1, 0.05, 2.0, {
            0.05: (2.4698e-10, 2.5765e-11, 1.6454e-12, 1.0354e-13, 3.9035),
            0.08: (3.0363e-10, 2.2482e-11, 1.4355e-12, 9.0325e-14, 3.9050),
            0.10: (2.7737e-10, 2.0499e-11, 1.3088e-12, 8.2354e-14, 3.9059),
            0.12: (2.5291e-10, 1.8661e-11, 1.1915e-12, 7.4974e-14, 3.9067),
        }),
        TableSpec("ex3_slfd_al1", "slfd_al1", "example3", 0.1, 0.05, 2.0, {
            0.05: (3.3591e-10, 2.5532e-11, 1.6435e-12, 1.0363e-13, 3.8875),
            0.08: (2.9279e-10, 2.2234e-11, 1.4316e-12, 9.0274e-14, 3.8878),
            0.10: (2.6655e-10, 2.0245e-11, 1.3040e-12, 8.2232e-14, 3.8875),
            0.12: (2.4192e-10, 1.8402e-11, 1.1859e-12, 7.4800e-14, 3.8864),
        }),
        TableSpec("ex3_lb_al2", "lb_al2", "example3", 0.1, 0.05, 2.0, {
            0.05: (3.3623e-10, 2.4941e-11, 1.6198e-12, 1.0859e-13, 3.8655),
            0.08: (3.0236e-10, 2.2327e-11, 1.4255e-12, 8.9788e-14, 3.9053),
            0.10: (2.8705e-10, 2.1531e-11, 1.3899e-12, 9.0262e-14, 3.8783),
            0.12: (2.7782e-10, 2.1517e-11, 1.4472e-12, 1.0597e-13, 3.7854),
        }),
        TableSpec("ex3_slfd_al2", "slfd_al2", "example3", 0.1, 0.05, 2.0, {
            0.05: (3.1243e-10, 2.4367e-11, 1.6078e-12, 1.0823e-13, 3.8317),
            0.08: (2.7863e-10, 2.1798e-11, 1.4165e-12, 8.9619e-14, 3.8674),
            0.10: (2.6390e-10, 2.1049e-11, 1.3848e-12, 9.0349e-14, 3.8374),
            0.12: (2.5489e-10, 2.1091e-11, 1.4472e-12, 1.0641e-13, 3.7420),
        }),
    ]
}

CR_TOLERANCE = 0.15
RMSE_FACTOR = 3.0


@dataclass
class TableRowResult:
    """Measured versus published values for one table row.

    Attributes:
        table_id: Table identifier.
        epsilon: Row key.
        report: The measured convergence study.
        ref_rmse: Published RMSE per rung.
        ref_cr: Published rate.
    """

    table_id: str
    epsilon: float
    report: ConvergenceReport
    ref_rmse: tuple
    ref_cr: float

    @property
    def rmse_ratios(self) -> list:
        return [m / p for m, p in zip(self.report.rmses, self.ref_rmse)]

    @property
    def cr(self) -> float:
        """Comparable rate: average slope between the coarsest and finest rungs."""
        return self.report.endpoint

    @property
    def cr_ok(self) -> bool:
        return abs(self.cr - self.ref_cr) <= CR_TOLERANCE

    @property
    def rmse_ok(self) -> list:
        return [1 / RMSE_FACTOR <= r <= RMSE_FACTOR for r in self.rmse_ratios]

    @property
    def passed(self) -> bool:
        return self.cr_ok and all(self.rmse_ok)


def _run_row(args):
    table_id, eps, rungs = args
    spec = REFERENCE_TABLES[table_id]
    rep = convergence_study(spec.scheme, spec.example, eps, spec.dx0, spec.dt0, spec.t_final, rungs)
    row = spec.rows[eps]
    return TableRowResult(table_id, eps, rep, tuple(row[:-1][:rungs]), row[-1])


def reproduce_tables(which=None, rungs: int = 4, workers: int = 1) -> list[TableRowResult]:
    """Re-run published convergence tables.

    Args:
        which: Table ids (all when None).
        rungs: Ladder length (the tables use four).
        workers: Process count for independent rows.
    """
    ids = list(REFERENCE_TABLES) if which is None else list(which)
    unknown = [t for t in ids if t not in REFERENCE_TABLES]
    if unknown:
        raise KeyError(f"unknown table ids {unknown}")
    jobs = [(t, eps, rungs) for t in ids for eps in REFERENCE_TABLES[t].rows]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(_run_row, jobs))
    return [_run_row(j) for j in jobs]
