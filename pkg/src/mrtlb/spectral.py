"""Fourier-symbol machinery and von Neumann stability of the schemes.

Covers the moment-space shift symbol T(theta), the matrices P = T(I - S) and
Q = T S, characteristic polynomials by the Faddeev-LeVerrier recursion with
closed-form cross-checks, the amplification polynomial of the five-level
scheme, Routh-Hurwitz style root-location tests and the sign functions used
to establish stability over the legal parameter box.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import mpmath
import numpy as np

from .errors import SchemeMismatch
from .kinetic import orthogonal_matrix
from .macro_fd import StencilCoefficients, flfd_named
from .params import RelaxationSet

MARGIN = 1e-9


# --------------------------------------------------------------------------
# Symbol of the streaming operator
# --------------------------------------------------------------------------
def shifts(theta1, theta2) -> np.ndarray:
    """Shift phases (T0..T4) per velocity, stacked on the last axis."""
    t1 = np.asarray(theta1, dtype=float)
    t2 = np.asarray(theta2, dtype=float)
    t1, t2 = np.broadcast_arrays(t1, t2)
    one = np.ones(t1.shape, dtype=complex)
    return np.stack([one, np.exp(-1j * t1), np.exp(-1j * t2), np.exp(1j * t1), np.exp(1j * t2)],
                    axis=-1)


def symbol_entrywise(theta1, theta2, c: float = 1.0) -> np.ndarray:
    """Moment-space shift symbol assembled entry by entry."""
    t = shifts(theta1, theta2)
    t0, t1, t2, t3, t4 = (t[..., k] for k in range(5))
    tot = t1 + t2 + t3 + t4
    alt = t1 - t2 + t3 - t4
    dx = t1 - t3
    dy = t2 - t4
    z = np.zeros_like(t0)
    c2 = c * c
    rows = [
        [(t0 + tot) / 5, dx / (2 * c), dy / (2 * c), (tot - 4 * t0) / (20 * c2), alt / (4 * c2)],
        [c * dx / 5, (t1 + t3) / 2, z, dx / (20 * c), dx / (4 * c)],
        [c * dy / 5, z, (t2 + t4) / 2, dy / (20 * c), -dy / (4 * c)],
        [c2 * (tot - 4 * t0) / 5, c * dx / 2, c * dy / 2, (tot + 16 * t0) / 20, alt / 4],
        [c2 * alt / 5, c * dx / 2, -c * dy / 2, alt / 20, tot / 4],
    ]
    return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)


def symbol_product(theta1, theta2, c: float = 1.0) -> np.ndarray:
    """Moment-space shift symbol as M diag(T) M^-1."""
    m = orthogonal_matrix(c)
    t = shifts(theta1, theta2)
    return np.einsum("ij,...j,jk->...ik", m, t, np.linalg.inv(m))


@dataclass
class SymbolMatrices:
    """Shift symbol and the collision-split matrices at one Fourier mode.

    Attributes:
        theta1, theta2: Mode angles.
        shifts: (T0..T4).
        T: Moment-space shift symbol.
        P: T (I - S).
        Q: T S.
    """

    theta1: float
    theta2: float
    shifts: np.ndarray
    T: np.ndarray
    P: np.ndarray
    Q: np.ndarray


def build_symbol(rset: RelaxationSet, theta1: float, theta2: float, c: float = 1.0,
                 s1: float | None = None) -> SymbolMatrices:
    """Symbol matrices of the collide-and-stream step at mode (theta1, theta2).

    Args:
        s1: Override of the conserved-moment rate (``rset.s1`` by default).
    """
    rates = list(rset.rates())
    if s1 is not None:
        rates[0] = s1
    s = np.diag(np.array(rates, dtype=complex))
    t = symbol_entrywise(theta1, theta2, c)
    eye = np.eye(5, dtype=complex)
    return SymbolMatrices(float(theta1), float(theta2), shifts(theta1, theta2), t,
                          t @ (eye - s), t @ s)


# --------------------------------------------------------------------------
# Characteristic polynomials
# --------------------------------------------------------------------------
@dataclass
class CharPoly:
    """Monic characteristic polynomial X^n + u_{n-1} X^{n-1} + ... + u_0.

    Attributes:
        coeffs: (u_{n-1}, ..., u_0), highest power first.
    """

    coeffs: np.ndarray

    @property
    def degree(self) -> int:
        return self.coeffs.shape[-1]

    def upsilon(self, k: int):
        """Coefficient of X^k."""
        return self.coeffs[..., self.degree - 1 - k]

    def full(self) -> np.ndarray:
        one = np.ones(self.coeffs.shape[:-1] + (1,), dtype=self.coeffs.dtype)
        return np.concatenate([one, self.coeffs], axis=-1)


def char_poly_fl(a: np.ndarray) -> CharPoly:
    """Faddeev-LeVerrier trace recursion (batched over leading axes)."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[-1]
    eye = np.broadcast_to(np.eye(n, dtype=complex), a.shape)
    mk = np.zeros_like(a)
    ck = np.ones(a.shape[:-2], dtype=complex)
    out = []
    for k in range(1, n + 1):
        mk = a @ mk + ck[..., None, None] * eye
        ck = -np.trace(a @ mk, axis1=-2, axis2=-1) / k
        out.append(ck)
    return CharPoly(np.stack(out, axis=-1))


def char_poly_eig(a: np.ndarray) -> CharPoly:
    """Coefficients expanded from the eigenvalue product prod(X - lambda_k)."""
    lam = np.linalg.eigvals(np.asarray(a, dtype=complex))
    n = lam.shape[-1]
    poly = np.zeros(lam.shape[:-1] + (n + 1,), dtype=complex)
    poly[..., 0] = 1.0
    for k in range(n):
        shifted = np.zeros_like(poly)
        shifted[..., 1:] = poly[..., :-1] * lam[..., k:k + 1]
        poly = poly - shifted
    return CharPoly(poly[..., 1:])


def shift_sums(theta1, theta2):
    """(Z1, Z2): mean of the four moving shifts and of their cross products."""
    t = shifts(theta1, theta2)
    t1, t2, t3, t4 = (t[..., k] for k in range(1, 5))
    z1 = (t1 + t2 + t3 + t4) / 4
    z2 = (t1 * t2 + t1 * t4 + t2 * t3 + t3 * t4) / 4
    return z1, z2


def closed_form_coeffs(s2, s4, s5, z1, z2, t0=1.0) -> np.ndarray:
    """Characteristic coefficients (u4..u0) of P with an unrelaxed conserved moment."""
    a, b, c = s2, s4 / 5, s5
    u4 = 4 * b - 1 + z1 * (2 * a + b + c - 4)
    u3 = ((a * b + a * c - 2 * a - b - c + 2)
          + z1 * (8 * a * b - 2 * a + 4 * b * c - 17 * b - c + 4)
          + z2 * (a * a + a * b + a * c - 4 * a + b * c - 2 * b - 2 * c + 4))
    u2 = ((4 * a * b * c - 9 * a * b - a * c + 2 * a - 4 * b * c + 9 * b + c - 2)
          + z1 * (a * a * b + a * a * c - 2 * a * a + 2 * a * b * c - 4 * a * b - 4 * a * c
                  + 6 * a - 2 * b * c + 3 * b + 3 * c - 4)
          + z2 * (4 * a * a * b - a * a + 4 * a * b * c - 17 * a * b - a * c + 4 * a
                  - 9 * b * c + 18 * b + 2 * c - 4))
    u1 = ((a * a * b * c - a * a * b - a * a * c + a * a - 2 * a * b * c + 2 * a * b + 2 * a * c
           - 2 * a + b * c - b - c + 1)
          + z1 * (4 * a * a * b * c - 9 * a * a * b - a * a * c + 2 * a * a - 18 * a * b * c
                  + 28 * a * b + 4 * a * c - 6 * a + 14 * b * c - 19 * b - 3 * c + 4))
    u0 = -(1 - s2) ** 2 * (1 - s4) * (1 - s5) * t0 * np.ones_like(z1)
    return np.stack(np.broadcast_arrays(u4, u3, u2, u1, u0), axis=-1)


def printed_coeffs(s2, s4, s5, z1, z2, t0=1.0) -> np.ndarray:
    """The coefficient lines (u4..u0) exactly as published, for the audit."""
    u4 = 4 * s5 / 5 - 1 + (2 * s2 + s4 / 5 + s5 - 4) * z1
    u3 = (((4 * s4 * s5 + 8 * s2 * s4 - 17 * s4) / 5 - s5 - 2 * s2 + 4) * z1
          + ((s4 * s5 + s2 * s4 - 2 * s4) / 5 + s2 * s5 - 2 * s5 + s2 * s2 - 4 * s2) * z2
          + (s5 - 2 + s4 / 5) * (s2 - 1))
    u2 = (((4 * s2 * s4 * s5 - 2 * s4 * s5 + s2 * s2 * s4 - 4 * s2 * s4 + 3 * s4) / 5
           + s2 * s2 * s5 - 4 * s2 * s5 + 3 * s5 - 2 * s2 * s2 + 6 * s2 - 4) * z1
          + ((4 * s2 * s4 * s5 - 9 * s4 * s5 + 4 * s2 * s2 * s5 - 17 * s2 * s4 + 18 * s4) / 5
             - s2 * s5 + 2 * s5 - s2 * s2 + 4 * s2 - 4) * z2
          + ((4 * s2 * s4 * s5 - 4 * s4 * s5 - 9 * s2 * s4 + 9 * s4) / 5 - s2 * s5 + s5
             + 2 * s2 - 2))
    u1 = ((4 * s2 * s4 * s5 * (s2 - 1) / 5 - 56 * s4 * s5 - 36 * s2 * s4 + 76 * s4
           - 20 * s2 * s5 + 60 * s5 + 40 * s2 - 80) * z1
          + (s2 * s4 * s5 * (s2 - 1) / 5 - 4 * s4 * s5 - 4 * s2 * s4 + 4 * s4 - 20 * s2 * s5
             + 20 * s5 + 20 * s2 - 40))
    u0 = -(1 - s2) ** 2 * (1 - s4) * (1 - s5) * t0 * np.ones_like(z1)
    return np.stack(np.broadcast_arrays(u4, u3, u2, u1, u0), axis=-1)


@dataclass
class CharPolyAudit:
    """Agreement of the recursion with its oracles over random samples.

    Attributes:
        samples: Number of (parameter, mode) samples.
        max_err_eig: Max |recursion - eigenvalue expansion|.
        max_err_closed: Max |recursion - corrected closed forms|.
        printed_max_err: Per coefficient name, max |recursion - published line|.
        discrepancies: Names of published lines that disagree with the recursion.
    """

    samples: int
    max_err_eig: float
    max_err_closed: float
    printed_max_err: dict
    discrepancies: list
    tolerance: float


def audit_char_poly(samples: int = 1000, seed: int = 0, tol: float = 1e-11) -> CharPolyAudit:
    """Cross-check the characteristic coefficients of P at random legal samples."""
    rng = np.random.default_rng(seed)
    s2, s4, s5 = (rng.uniform(0.01, 1.99, samples) for _ in range(3))
    th1, th2 = (rng.uniform(-np.pi, np.pi, samples) for _ in range(2))
    t = symbol_entrywise(th1, th2)
    rates = np.stack([np.zeros(samples), s2, s2, s4, s5], axis=-1)
    p = t @ (np.eye(5) - rates[:, None, :] * np.eye(5))
    fl = char_poly_fl(p).coeffs
    eig = char_poly_eig(p).coeffs
    z1, z2 = shift_sums(th1, th2)
    closed = closed_form_coeffs(s2, s4, s5, z1, z2)
    printed = printed_coeffs(s2, s4, s5, z1, z2)
    names = ["upsilon4", "upsilon3", "upsilon2", "upsilon1", "upsilon0"]
    perr = {n: float(np.abs(fl[:, k] - printed[:, k]).max()) for k, n in enumerate(names)}
    return CharPolyAudit(
        samples=samples,
        max_err_eig=float(np.abs(fl - eig).max()),
        max_err_closed=float(np.abs(fl - closed).max()),
        printed_max_err=perr,
        discrepancies=[n for n, e in perr.items() if e > tol],
        tolerance=tol,
    )


# --------------------------------------------------------------------------
# Amplification polynomial of the five-level scheme
# --------------------------------------------------------------------------
def level_symbols(coeffs: StencilCoefficients, theta1, theta2) -> np.ndarray:
    """Fourier symbol of each time level of a stencil, stacked on the last axis."""
    lay = coeffs.layout()
    c1 = np.cos(np.asarray(theta1, dtype=float))
    c2 = np.cos(np.asarray(theta2, dtype=float))
    c1, c2 = np.broadcast_arrays(c1, c2)
    out = [lay[k, 0] + 2 * lay[k, 1] * c1 + 2 * lay[k, 2] * c2 + 4 * lay[k, 3] * c1 * c2
           for k in range(coeffs.depth)]
    return np.stack(out, axis=-1)


def flfd_a(s2, s4, w0, chi1, chi2) -> np.ndarray:
    """Quartic coefficients (a1..a4) of the five-level amplification matrix."""
    d = flfd_named(np.asarray(s2, float), np.asarray(s4, float), np.asarray(w0, float))
    s = np.asarray(chi1, float) + np.asarray(chi2, float)
    p = np.asarray(chi1, float) * np.asarray(chi2, float)
    a1 = -(d["alpha1"] + 2 * d["alpha2"] * s)
    a2 = -(d["beta1"] + 2 * d["beta2"] * s + 4 * d["beta3"] * p)
    a3 = -(d["gamma1"] + 2 * d["gamma2"] * s + 4 * d["gamma3"] * p)
    a4 = -2 * d["zeta2"] * s
    return np.stack(np.broadcast_arrays(a1, a2, a3, a4), axis=-1)


def schur_p(a: np.ndarray) -> np.ndarray:
    """Coefficients (p1..p4) of the reduced cubic q(lambda)."""
    a1, a2, a3, a4 = (a[..., k] for k in range(4))
    return np.stack([1 - a4 * a4, a1 - a3 * a4, a2 - a2 * a4, a3 - a1 * a4], axis=-1)


def companion_roots(a: np.ndarray) -> np.ndarray:
    """Roots of lambda^n + a1 lambda^{n-1} + ... + an (batched)."""
    a = np.asarray(a)
    n = a.shape[-1]
    comp = np.zeros(a.shape[:-1] + (n, n), dtype=a.dtype)
    comp[..., 0, :] = -a
    idx = np.arange(n - 1)
    comp[..., idx + 1, idx] = 1.0
    return np.linalg.eigvals(comp)


def refined_max_modulus(s2, s4, w0, theta1, theta2, dps: int = 40) -> float:
    """Max root modulus with coefficients and roots in extended precision.

    Double-precision eigenvalues scatter a k-fold root by about eps**(1/k),
    which on closure faces of the box can exceed the unit circle by 1e-5.
    """
    with mpmath.workdps(dps):
        s2, s4, w0, t1, t2 = (mpmath.mpf(float(v)) for v in (s2, s4, w0, theta1, theta2))
        d = flfd_named(s2, s4, w0)
        c1, c2 = mpmath.cos(t1), mpmath.cos(t2)
        s, p = c1 + c2, c1 * c2
        a = [-(d["alpha1"] + 2 * d["alpha2"] * s),
             -(d["beta1"] + 2 * d["beta2"] * s + 4 * d["beta3"] * p),
             -(d["gamma1"] + 2 * d["gamma2"] * s + 4 * d["gamma3"] * p),
             -2 * d["zeta2"] * s]
        comp = mpmath.matrix(4, 4)
        for j in range(4):
            comp[0, j] = -a[j]
        for j in range(3):
            comp[j + 1, j] = 1
        ev = mpmath.eig(comp, left=False, right=False)
        return float(max(abs(v) for v in ev))


@dataclass
class AmplificationPoly:
    """p(lambda) = lambda^4 + a1 lambda^3 + a2 lambda^2 + a3 lambda + a4 and q's p1..p4."""

    a: np.ndarray
    p: np.ndarray

    def roots(self) -> np.ndarray:
        return companion_roots(self.a)

    def max_modulus(self) -> np.ndarray:
        return np.abs(self.roots()).max(axis=-1)

    def value(self, lam):
        a1, a2, a3, a4 = (self.a[..., k] for k in range(4))
        return lam**4 + a1 * lam**3 + a2 * lam**2 + a3 * lam + a4


def amplification_poly(rset: RelaxationSet, chi1, chi2) -> AmplificationPoly:
    """Amplification polynomial of the five-level scheme at (cos theta1, cos theta2).

    Raises:
        SchemeMismatch: If ``rset`` is not a five-level (s5 = 1) set.
    """
    if rset.s5 != 1.0:
        raise SchemeMismatch(f"five-level amplification needs s5 = 1, got {rset.s5}")
    a = flfd_a(rset.s2, rset.s4, rset.w0, chi1, chi2)
    return AmplificationPoly(a, schur_p(a))


# --------------------------------------------------------------------------
# Root-location conditions
# --------------------------------------------------------------------------
class Verdict(str, Enum):
    STABLE = "stable"
    MARGINAL = "marginal"
    UNSTABLE = "unstable"


def conditions_direct(p: np.ndarray) -> np.ndarray:
    """The five inequalities derived directly from the bilinear map."""
    p1, p2, p3, p4 = (p[..., k] for k in range(4))
    return np.stack([p1 - p2 + p3 - p4, p1 + p2 + p3 + p4, p1 - p4, p1 + p4,
                     p1 * p1 - p1 * p3 - p4 * p4 + p2 * p4], axis=-1)


def conditions_hurwitz(p: np.ndarray) -> np.ndarray:
    """Routh-Hurwitz conditions for the transformed cubic."""
    p1, p2, p3, p4 = (p[..., k] for k in range(4))
    return np.stack([p1 - p2 + p3 - p4, 3 * p1 + 3 * p4 - p2 - p3, 3 * p1 - 3 * p4 - p3 + p2,
                     p1 + p2 + p3 + p4, p1 * p1 - p1 * p3 - p4 * p4 + p2 * p4], axis=-1)


def classify(cond: np.ndarray, tol: float = MARGIN) -> np.ndarray:
    """Verdict codes per point: 0 stable, 1 marginal, 2 unstable."""
    unstable = (cond < -tol).any(axis=-1)
    marginal = (np.abs(cond) <= tol).any(axis=-1)
    return np.where(unstable, 2, np.where(marginal, 1, 0))


_CODES = (Verdict.STABLE, Verdict.MARGINAL, Verdict.UNSTABLE)


@dataclass
class RouthHurwitzResult:
    """Verdicts of both condition sets at one point.

    Attributes:
        verdict: From the direct set.
        verdict_hurwitz: From the Routh-Hurwitz set.
        conditions: Values of the direct set.
        conditions_hurwitz: Values of the Routh-Hurwitz set.
        witness: Index of the first failing (or marginal) direct condition, or None.
    """

    verdict: Verdict
    verdict_hurwitz: Verdict
    conditions: np.ndarray
    conditions_hurwitz: np.ndarray
    witness: int | None

    @property
    def agree(self) -> bool:
        return self.verdict == self.verdict_hurwitz


def routh_hurwitz_check(poly: AmplificationPoly | np.ndarray, tol: float = MARGIN) -> RouthHurwitzResult:
    """Classify a single amplification polynomial (or raw p1..p4)."""
    p = poly.p if isinstance(poly, AmplificationPoly) else np.asarray(poly, dtype=float)
    cd = conditions_direct(p)
    ch = conditions_hurwitz(p)
    vd = int(classify(cd, tol))
    vh = int(classify(ch, tol))
    bad = np.where(cd <= tol)[0]
    return RouthHurwitzResult(_CODES[vd], _CODES[vh], cd, ch, int(bad[0]) if bad.size else None)


# --------------------------------------------------------------------------
# Grid scans
# --------------------------------------------------------------------------
@dataclass
class ScanReport:
    """Result of a stability scan.

    Attributes:
        points: Number of grid points.
        max_modulus: Largest root modulus found.
        argmax: Parameters (s2, s4, w0, theta1, theta2) at the maximum.
        exceed: Number of points with a root beyond 1 + tol.
        disagreements: Up to ``keep`` points where the two condition sets differ.
        n_disagree: Total number of such points.
        refined: Points recomputed in extended precision.
        verdict_counts: {verdict: count} for the direct set.
        unstable_points: Up to ``keep`` points flagged unstable by the root test.
        empirical: True when the scanned family lies outside the proved region.
    """

    points: int
    max_modulus: float
    argmax: tuple
    exceed: int
    disagreements: list
    n_disagree: int
    refined: int
    verdict_counts: dict
    unstable_points: list = field(default_factory=list)
    empirical: bool = False
    seconds: float = 0.0
    rows: np.ndarray | None = None


def closure_axes(n: int = 12):
    """Grid axes spanning the closed legal box and the full mode square."""
    return (np.linspace(0.0, 2.0, n), np.linspace(0.0, 2.0, n), np.linspace(0.0, 1.0, n),
            np.linspace(-np.pi, np.pi, n), np.linspace(-np.pi, np.pi, n))


def stability_scan(s2_values, s4_values, w0_values, theta1_values, theta2_values,
                   tol: float = MARGIN, chunk: int = 200_000, keep: int = 20,
                   record: bool = False, refine_band: float = 1e-3) -> ScanReport:
    """Scan the five-level amplification polynomial over a tensor grid.

    Args:
        record: Keep per-point rows (s2, s4, w0, theta1, theta2, max_mod, verdict).
        refine_band: Points whose double-precision modulus lies in
            (1 + tol, 1 + refine_band] are recomputed in extended precision.
    """
    import time

    axes = [np.asarray(v, dtype=float) for v in
            (s2_values, s4_values, w0_values, theta1_values, theta2_values)]
    if any(v.size < 2 for v in axes):
        raise ValueError("each scan axis needs at least two values")
    t0 = time.perf_counter()
    grids = [g.ravel() for g in np.meshgrid(*axes, indexing="ij")]
    total = grids[0].size
    best, where, exceed = -1.0, None, 0
    dis, bad, counts, n_dis, refined = [], [], np.zeros(3, dtype=int), 0, 0
    rows = [] if record else None
    for lo in range(0, total, chunk):
        sl = slice(lo, lo + chunk)
        s2, s4, w0, t1, t2 = (g[sl] for g in grids)
        a = flfd_a(s2, s4, w0, np.cos(t1), np.cos(t2))
        mod = np.abs(companion_roots(a)).max(axis=-1)
        for j in np.where((mod > 1 + tol) & (mod <= 1 + refine_band))[0]:
            mod[j] = refined_max_modulus(s2[j], s4[j], w0[j], t1[j], t2[j])
            refined += 1
        p = schur_p(a)
        vd = classify(conditions_direct(p), tol)
        vh = classify(conditions_hurwitz(p), tol)
        counts += np.bincount(vd, minlength=3)
        k = int(mod.argmax())
        if mod[k] > best:
            best, where = float(mod[k]), (s2[k], s4[k], w0[k], t1[k], t2[k])
        over = np.where(mod > 1 + tol)[0]
        exceed += over.size
        for j in over[: max(0, keep - len(bad))]:
            bad.append((s2[j], s4[j], w0[j], t1[j], t2[j], float(mod[j])))
        for j in np.where(vd != vh)[0][: max(0, keep - len(dis))]:
            dis.append((s2[j], s4[j], w0[j], t1[j], t2[j], _CODES[vd[j]].value, _CODES[vh[j]].value))
        if record:
            rows.append(np.column_stack([s2, s4, w0, t1, t2, mod, vd]))
        n_dis += int((vd != vh).sum())
    report = ScanReport(
        points=total,
        max_modulus=best,
        argmax=tuple(float(v) for v in where),
        exceed=exceed,
        disagreements=dis,
        n_disagree=n_dis,
        refined=refined,
        verdict_counts={_CODES[i].value: int(counts[i]) for i in range(3)},
        unstable_points=bad,
        seconds=time.perf_counter() - t0,
        rows=np.concatenate(rows) if record else None,
    )
    return report


def modulus_map(rset: RelaxationSet, n: int = 64):
    """Max root modulus over an n x n mode grid at fixed parameters.

    Five-level sets use the quartic; other six-level sets use the level
    symbols of their stencil (empirical, outside the proved family).
    """
    from .macro_fd import SchemeKind, build_coefficients

    th = np.linspace(-np.pi, np.pi, n)
    t1, t2 = np.meshgrid(th, th, indexing="ij")
    if rset.s5 == 1.0:
        a = flfd_a(rset.s2, rset.s4, rset.w0, np.cos(t1), np.cos(t2))
    else:
        coeffs = build_coefficients(rset, SchemeKind.SLFD)
        a = -level_symbols(coeffs, t1, t2)
    return th, np.abs(companion_roots(a)).max(axis=-1)


# --------------------------------------------------------------------------
# Sign functions
# --------------------------------------------------------------------------
def sign_f(s2, s4, w0, chi1, chi2):
    """F with p1 - p2 + p3 - p4 = -[(s4-1)(s2-1)^2(chi1+chi2) + 2] F / 4."""
    s = chi1 + chi2
    p = chi1 * chi2
    return (s * (4 * (s2 - 1) * (2 - s4) + s2 * s2 * (s4 * (w0 + 1) - 2))
            + p * (4 * (1 - s2) * (s2 + s4 - 2) + 2 * s2 * s4 * (s2 - 1) * (1 - w0))
            - 2 * s2 * s4 * (w0 + 1) + 4 * (s2 + s4 - 2))


def sign_f_printed(s2, s4, w0, chi1, chi2):
    """F with the published constant term 2 s2 s4 (w0 - 1)."""
    return sign_f(s2, s4, w0, chi1, chi2) + 4 * s2 * s4 * w0


def _p_of(s2, s4, w0, chi1, chi2):
    return schur_p(flfd_a(s2, s4, w0, chi1, chi2))


def sign_h(s2, s4, w0, chi1, chi2):
    """H = p1^2 - p4^2."""
    p = _p_of(s2, s4, w0, chi1, chi2)
    return p[..., 0] ** 2 - p[..., 3] ** 2


def sign_h_closed(s2, s4, w0, chi1, chi2):
    """Closed form of H as a difference of squares."""
    s = chi1 + chi2
    p = chi1 * chi2
    a = s * s * (s2 - 1) ** 4 * (s4 - 1) ** 2 / 4 - 1
    b = ((s2 - 1) * (s4 - 1) - s * (s2 - 1) * (s4 * w0 * (s2 - 1) - s2 + 1) / 2
         + p * (s4 * w0 * (s2 - 1) ** 2 - (s2 - 1) * (s2 - 2) * (s4 - 1))
         + s * (s2 - 1) ** 2 * (s4 - 1) / 4 * (2 * s4 * (w0 - 1) - s * (2 * s2 + s4 * w0 - 3) + 2))
    return a * a - b * b


def sign_k(s2, s4, w0, chi1, chi2):
    """K = p1^2 - p1 p3 - p4^2 + p2 p4."""
    p = _p_of(s2, s4, w0, chi1, chi2)
    p1, p2, p3, p4 = (p[..., k] for k in range(4))
    return p1 * p1 - p1 * p3 - p4 * p4 + p2 * p4


def k1(s2, chi1, chi2):
    """Factor of K on the s4 = 0 face."""
    s = chi1 + chi2
    return chi1 * chi2 * (s2 - 1) * (2 - s2) + s2 + s * s / 4 * ((2 - s2) * (2 - s2 + s2**3) - 2)


def k_s4_zero(s2, chi1, chi2):
    """Factorized K on the s4 = 0 face."""
    s = chi1 + chi2
    return ((2 - s2) * (s / 2 * (s2 - 1) ** 2 + 1)
            * (chi1 * chi2 * (1 - s2) + s / 2 * (s2 - 2) + 1) * k1(s2, chi1, chi2))


def k11(s2, chi2):
    return 2 * s2 - 3 * s2**2 + s2**3 - 2 + chi2 * (2 * s2 - 2 + s2**2 - s2**3)


def k12(s2, chi2):
    return chi2 * (2 - s2**2) * (1 - s2) + 2 * (s2 - 1) + s2**2 * (s2 - 3)


SIGN_FUNCTIONS: dict[str, tuple[Callable, int]] = {
    "F": (sign_f, -1),
    "H": (sign_h, +1),
    "K": (sign_k, +1),
}


@dataclass(frozen=True)
class BoundaryCase:
    """One face (or edge) of the closed box with a factorized F.

    Attributes:
        name: Identifier.
        fixed: {variable: value} defining the face.
        form: Factorized expression in the full variable set.
        sign: Asserted sign (-1 means negative on the open face).
    """

    name: str
    fixed: dict
    form: Callable
    sign: int = -1


def _bc(name, fixed, form):
    return BoundaryCase(name, fixed, form)


BOUNDARY_CASES = [
    _bc("s2=0", {"s2": 0.0}, lambda s2, s4, w0, x, y: 4 * (s4 - 2) * (1 + x) * (1 + y)),
    _bc("s2=2", {"s2": 2.0}, lambda s2, s4, w0, x, y: -4 * s4 * w0 * (1 - x) * (1 - y)),
    _bc("s4=0", {"s4": 0.0},
        lambda s2, s4, w0, x, y: 2 * (s2 - 2) * ((2 - s2) * (1 + x) * (1 + y) + s2 * (1 - x * y))),
    _bc("s4=2", {"s4": 2.0},
        lambda s2, s4, w0, x, y: 2 * s2 * w0 * (s2 * (x - 1) * (1 - y) + (s2 - 2) * (1 - x * y))),
    _bc("w0=0", {"w0": 0.0},
        lambda s2, s4, w0, x, y: -(2 - s2) * (2 - s4) * ((1 + x) * (1 + y) * (2 - s2) + s2 * (1 - x * y))),
    _bc("w0=1", {"w0": 1.0},
        lambda s2, s4, w0, x, y: (4 * (1 + x * y + x + y) * (s2 * (2 - s2) - ((1 - s2) * (1 - s4) + 1) - 0.25)
                                  + (x + y) * (1 - 2 * s2 * (2 - s2) + 2 * s2 * s2 * s4) + x * y
                                  + (1 - 4 * s2 * (2 - s2)))),
    _bc("chi1=-1", {"chi1": -1.0},
        lambda s2, s4, w0, x, y: -s2 * ((1 + y) * (4 - 2 * s2 - 2 * s4 + s2 * s4 + 2 * s4 * w0)
                                        + s2 * s4 * w0 * (1 - 3 * y))),
    _bc("chi1=1", {"chi1": 1.0},
        lambda s2, s4, w0, x, y: (2 - s2) * ((1 + y) * (-8 + 6 * s2 + 4 * s4 - 3 * s2 * s4 + s2 * s4 * w0)
                                             - 4 * s2 + 2 * s2 * s4 * (1 - w0))),
    _bc("w0=1,chi1=-1", {"w0": 1.0, "chi1": -1.0},
        lambda s2, s4, w0, x, y: 2 * s2 * (1 + y) * (s2 - 2) + 2 * s2 * s2 * s4 * (y - 1)),
    _bc("w0=1,chi1=1", {"w0": 1.0, "chi1": 1.0},
        lambda s2, s4, w0, x, y: 2 * (2 - s2) * ((1 + y) * (2 - s2) * (s4 - 2) + s2 * (y - 1))),
    _bc("chi1=-1,chi2=-1", {"chi1": -1.0, "chi2": -1.0},
        lambda s2, s4, w0, x, y: -4 * s2 * s2 * s4 * w0),
    _bc("chi1=-1,chi2=1", {"chi1": -1.0, "chi2": 1.0},
        lambda s2, s4, w0, x, y: 2 * s2 * (s2 - 2) * (2 + s4 * (w0 - 1))),
    _bc("chi1=1,chi2=1", {"chi1": 1.0, "chi2": 1.0},
        lambda s2, s4, w0, x, y: 4 * (s2 - 2) ** 2 * (s4 - 2)),
]

_ORDER = ("s2", "s4", "w0", "chi1", "chi2")
_HIGH = {"s2": 2.0, "s4": 2.0, "w0": 1.0, "chi1": 1.0, "chi2": 1.0}
_LOW = {"s2": 0.0, "s4": 0.0, "w0": 0.0, "chi1": -1.0, "chi2": -1.0}


def sample_omega(n: int, rng: np.random.Generator) -> tuple:
    """Uniform points in the open box (open ends resampled away by construction)."""
    out = []
    for name in _ORDER:
        lo, hi = _LOW[name], _HIGH[name]
        u = rng.uniform(lo, hi, n)
        out.append(np.where(u == lo, (lo + hi) / 2, u))
    return tuple(out)


@dataclass
class SignReport:
    """Sign-violation summary of one sampled function.

    Attributes:
        name: Function or face name.
        samples: Points evaluated.
        violations: Number of points with the wrong sign.
        extreme: Value closest to (or across) zero.
        identity_error: Max |F restricted to the face - factorized form|, for faces.
        examples: Up to five violating points.
    """

    name: str
    samples: int
    violations: int
    extreme: float
    identity_error: float | None = None
    examples: list = field(default_factory=list)


def sample_sign_functions(which=("F", "H", "K"), points: int = 1_000_000, seed: int = 0,
                          chunk: int = 250_000) -> dict[str, SignReport]:
    """Evaluate sign functions at seeded uniform points of the open box."""
    rng = np.random.default_rng(seed)
    stats = {w: [0, np.inf if SIGN_FUNCTIONS[w][1] > 0 else -np.inf, []] for w in which}
    for lo in range(0, points, chunk):
        pts = sample_omega(min(chunk, points - lo), rng)
        for w in which:
            fn, sign = SIGN_FUNCTIONS[w]
            v = fn(*pts)
            bad = np.where(sign * v <= 0)[0]
            st = stats[w]
            st[0] += bad.size
            st[1] = min(st[1], v.min()) if sign > 0 else max(st[1], v.max())
            for j in bad[: 5 - len(st[2])]:
                st[2].append(tuple(float(q[j]) for q in pts))
    return {w: SignReport(w, points, s[0], float(s[1]), examples=s[2]) for w, s in stats.items()}


def sample_boundary_cases(samples: int = 10_000, seed: int = 0,
                          cases=None) -> dict[str, SignReport]:
    """Evaluate each factorized face form at random points of its open face."""
    rng = np.random.default_rng(seed)
    out = {}
    for case in cases or BOUNDARY_CASES:
        pts = list(sample_omega(samples, rng))
        for k, name in enumerate(_ORDER):
            if name in case.fixed:
                pts[k] = np.full(samples, case.fixed[name])
        form = case.form(*pts)
        ident = float(np.abs(sign_f(*pts) - form).max())
        bad = np.where(case.sign * form <= 0)[0]
        ext = form.max() if case.sign < 0 else form.min()
        out[case.name] = SignReport(case.name, samples, int(bad.size), float(ext), ident,
                                    [tuple(float(q[j]) for q in pts) for j in bad[:5]])
    return out
