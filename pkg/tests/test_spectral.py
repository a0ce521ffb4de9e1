"""Symbols, characteristic polynomials, amplification roots and sign functions."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mrtlb import spectral as sp
from mrtlb.errors import SchemeMismatch
from mrtlb.macro_fd import ScalarHistory, SchemeKind, build_coefficients, fd_step
from mrtlb.params import RelaxationSet, derive_fourth_order


class TestSymbol:
    def test_identity_at_zero_mode(self):
        s = sp.build_symbol(derive_fourth_order(0.1, 1.2), 0.0, 0.0)
        assert np.abs(s.T - np.eye(5)).max() < 1e-14

    def test_dual_construction(self):
        rng = np.random.default_rng(0)
        th1, th2 = rng.uniform(-np.pi, np.pi, (2, 1000))
        for c in (1.0, 2.5):
            a = sp.symbol_entrywise(th1, th2, c)
            b = sp.symbol_product(th1, th2, c)
            assert np.abs(a - b).max() < 1e-13

    def test_real_at_pi(self):
        s = sp.build_symbol(derive_fourth_order(0.1, 1.0), np.pi, np.pi)
        assert np.abs(s.T.imag).max() < 1e-15

    def test_split(self):
        r = derive_fourth_order(0.1, 1.2)
        s = sp.build_symbol(r, 0.3, -1.1)
        assert np.abs(s.P + s.Q - s.T).max() < 1e-15


class TestCharPoly:
    def test_scalar_matrix(self):
        cp = sp.char_poly_fl(0.5 * np.eye(5))
        want = np.poly(np.full(5, 0.5))
        assert np.abs(cp.full() - want).max() < 1e-15
        assert cp.degree == 5
        assert cp.upsilon(0) == pytest.approx(-(0.5**5))

    def test_eigen_product(self):
        rng = np.random.default_rng(1)
        a = rng.standard_normal((50, 5, 5)) + 1j * rng.standard_normal((50, 5, 5))
        assert np.abs(sp.char_poly_fl(a).coeffs - sp.char_poly_eig(a).coeffs).max() < 1e-11

    def test_constant_coefficient_at_zero_mode(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            s2, s4, s5 = rng.uniform(0.01, 1.99, 3)
            r = RelaxationSet(1.0, s2, s4, s5, 0.5)
            p = sp.build_symbol(r, 0.0, 0.0, s1=0.0).P
            u0 = sp.char_poly_fl(p).upsilon(0)
            assert u0 == pytest.approx(-(1 - s2) ** 2 * (1 - s4) * (1 - s5), abs=1e-13)
            assert -u0 == pytest.approx(np.prod(np.linalg.eigvals(p)), abs=1e-13)

    def test_audit(self):
        rep = sp.audit_char_poly(samples=1000, seed=0)
        assert rep.max_err_eig < 1e-11
        assert rep.max_err_closed < 1e-11
        # The published constant coefficient is the only line that matches.
        assert rep.printed_max_err["upsilon0"] < 1e-11
        assert set(rep.discrepancies) == {"upsilon4", "upsilon3", "upsilon2", "upsilon1"}


class TestAmplification:
    def test_consistency_root(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            s2, s4 = rng.uniform(0.01, 1.99, 2)
            r = RelaxationSet(1.0, s2, s4, 1.0, rng.uniform(0.01, 0.99))
            poly = sp.amplification_poly(r, 1.0, 1.0)
            assert abs(poly.value(1.0)) < 1e-13
            assert 1 + poly.a.sum() == pytest.approx(0.0, abs=1e-13)

    def test_zero_mode_products(self):
        r = derive_fourth_order(0.1, 1.0)
        poly = sp.amplification_poly(r, 0.0, 0.0)
        assert poly.a[3] == 0.0
        assert poly.p[3] == poly.a[2]

    def test_sample_point_is_stable(self):
        poly = sp.amplification_poly(derive_fourth_order(0.1, 1.0), 0.3, -0.7)
        assert poly.max_modulus() <= 1.0

    def test_requires_five_level(self):
        with pytest.raises(SchemeMismatch):
            sp.amplification_poly(derive_fourth_order(0.1, 1.2), 0.0, 0.0)

    def test_a_matches_level_symbols(self):
        r = derive_fourth_order(0.1, 1.0)
        c = build_coefficients(r, SchemeKind.FLFD)
        th1, th2 = np.random.default_rng(4).uniform(-np.pi, np.pi, (2, 100))
        a = sp.flfd_a(r.s2, r.s4, r.w0, np.cos(th1), np.cos(th2))
        assert np.abs(a + sp.level_symbols(c, th1, th2)).max() < 1e-15

    @pytest.mark.parametrize("kind,s5", [(SchemeKind.FLFD, 1.0), (SchemeKind.SLFD, 1.2)])
    def test_plane_wave_through_stencil(self, kind, s5):
        # A discrete plane wave pushed through fd_step follows the companion action.
        n = 16
        r = derive_fourth_order(0.1, s5)
        c = build_coefficients(r, kind)
        m1, m2 = 3, 5
        th1, th2 = 2 * np.pi * m1 / n, 2 * np.pi * m2 / n
        i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        wave = np.exp(1j * (th1 * i + th2 * j))
        rng = np.random.default_rng(5)
        amps = rng.standard_normal(c.depth) + 1j * rng.standard_normal(c.depth)
        out = np.zeros((n, n), dtype=complex)
        for part in (np.real, np.imag):
            h = ScalarHistory(c.depth, (n, n))
            for k in reversed(range(c.depth)):
                h.push(part(amps[k] * wave))
            res = fd_step(h, c, 0.0, 1.0)
            out += res if part is np.real else 1j * res
        levels = sp.level_symbols(c, th1, th2)
        comp = np.zeros((c.depth, c.depth))
        comp[0] = levels
        comp[np.arange(1, c.depth), np.arange(c.depth - 1)] = 1.0
        predicted = (comp @ amps)[0]
        assert np.abs(out - predicted * wave).max() < 1e-12

    def test_zero_mode_roots(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            s2, s4 = rng.uniform(0.05, 1.95, 2)
            r = RelaxationSet(1.0, s2, s4, 1.0, rng.uniform(0.05, 0.95))
            roots = sp.amplification_poly(r, 1.0, 1.0).roots()
            k = np.argmin(np.abs(roots - 1))
            assert abs(roots[k] - 1) < 1e-10
            assert (np.abs(np.delete(roots, k)) < 1).all()


class TestRouthHurwitz:
    def test_interior_point(self):
        r = RelaxationSet(1.0, 1.2, 0.57, 1.0, 0.1)
        res = sp.routh_hurwitz_check(sp.amplification_poly(r, 0.5, 0.5))
        assert res.verdict is sp.Verdict.STABLE and res.agree and res.witness is None

    def test_zero_mode_marginal(self):
        r = RelaxationSet(1.0, 1.2, 0.57, 1.0, 0.1)
        poly = sp.amplification_poly(r, 1.0, 1.0)
        res = sp.routh_hurwitz_check(poly)
        assert res.verdict is sp.Verdict.MARGINAL and res.agree
        roots = poly.roots()
        on = np.where(np.abs(np.abs(roots) - 1) <= 1e-9)[0]
        assert on.size == 1
        others = np.delete(roots, on)
        assert np.abs(others - roots[on[0]]).min() > 1e-7

    def test_fabricated_unstable(self):
        res = sp.routh_hurwitz_check(np.array([1.0, 0.0, 0.0, 2.0]))
        assert res.verdict is sp.Verdict.UNSTABLE
        assert res.verdict_hurwitz is sp.Verdict.UNSTABLE

    def test_condition_identity(self):
        # BC - AD = 8K with the Hurwitz pair (B, C) and the direct pair (A, D).
        p = np.random.default_rng(7).standard_normal((1000, 4))
        d = sp.conditions_direct(p)
        h = sp.conditions_hurwitz(p)
        assert np.abs(h[:, 1] * h[:, 2] - d[:, 0] * d[:, 1] - 8 * d[:, 4]).max() < 1e-12

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0.01, 1.99), st.floats(0.01, 1.99), st.floats(0.01, 0.99),
           st.floats(-np.pi, np.pi), st.floats(-np.pi, np.pi))
    def test_verdict_matches_roots(self, s2, s4, w0, t1, t2):
        a = sp.flfd_a(s2, s4, w0, np.cos(t1), np.cos(t2))
        res = sp.routh_hurwitz_check(sp.AmplificationPoly(a, sp.schur_p(a)))
        assert res.agree
        if res.verdict is sp.Verdict.STABLE:
            assert np.abs(sp.companion_roots(a)).max() < 1 + 1e-9


class TestScan:
    def test_closure_small(self):
        rep = sp.stability_scan(*sp.closure_axes(6))
        assert rep.points == 6**5
        assert rep.max_modulus <= 1 + sp.MARGIN
        assert rep.exceed == 0 and rep.n_disagree == 0

    def test_s4_one_subbox(self):
        ax = sp.closure_axes(8)
        rep = sp.stability_scan(ax[0], np.full(2, 1.0), ax[2], ax[3], ax[4])
        assert rep.max_modulus <= 1 + sp.MARGIN

    def test_illegal_box(self):
        ax = sp.closure_axes(5)
        rep = sp.stability_scan(ax[0], ax[1], np.array([1.5, 1.6]), ax[3], ax[4])
        assert rep.exceed > 0 and rep.unstable_points

    def test_record_rows(self):
        ax = sp.closure_axes(3)
        rep = sp.stability_scan(*ax, record=True)
        assert rep.rows.shape == (3**5, 7)
        assert rep.rows[:, 5].max() == pytest.approx(rep.max_modulus)

    def test_refinement_removes_float_artefact(self):
        # A closure-face point where double-precision eigenvalues overshoot.
        a = sp.flfd_a(0.0, 2.0, 0.0, 1.0, 1.0)
        assert sp.refined_max_modulus(0.0, 2.0, 0.0, 0.0, 0.0) <= 1 + 1e-12
        assert np.isfinite(np.abs(sp.companion_roots(a)).max())

    def test_modulus_map(self):
        th, mod = sp.modulus_map(derive_fourth_order(0.1, 1.0), 16)
        assert mod.shape == (16, 16) and mod.max() <= 1 + 1e-9
        th, mod6 = sp.modulus_map(derive_fourth_order(0.1, 1.2), 16)
        assert mod6.shape == (16, 16)


class TestSignFunctions:
    def test_f_at_s2_two(self):
        rng = np.random.default_rng(8)
        s4, w0, x, y = rng.uniform(0, 1, (4, 100))
        got = sp.sign_f(2.0 - 1e-12, s4, w0, x, y)
        assert np.allclose(got, -4 * s4 * w0 * (1 - x) * (1 - y), atol=1e-10)

    def test_h_at_s2_one(self):
        rng = np.random.default_rng(9)
        s4, w0, x, y = rng.uniform(0, 1, (4, 100))
        assert np.allclose(sp.sign_h(1.0, s4, w0, x, y), 1.0)

    def test_f_matches_alternating_sum(self):
        pts = sp.sample_omega(2000, np.random.default_rng(10))
        s2, s4, w0, x, y = pts
        p = sp.schur_p(sp.flfd_a(*pts))
        alt = p[:, 0] - p[:, 1] + p[:, 2] - p[:, 3]
        pref = -((s4 - 1) * (s2 - 1) ** 2 * (x + y) + 2) / 4
        assert np.abs(alt - pref * sp.sign_f(*pts)).max() < 1e-12
        assert np.abs(sp.sign_f_printed(*pts) - sp.sign_f(*pts) - 4 * s2 * s4 * w0).max() < 1e-12

    def test_h_closed_form(self):
        pts = sp.sample_omega(2000, np.random.default_rng(11))
        assert np.abs(sp.sign_h(*pts) - sp.sign_h_closed(*pts)).max() < 1e-12

    def test_k_on_s4_zero_face(self):
        rng = np.random.default_rng(12)
        s2, x, y = rng.uniform(0, 2, 500), rng.uniform(-1, 1, 500), rng.uniform(-1, 1, 500)
        k = sp.sign_k(s2, 0.0, 0.5, x, y)
        assert np.abs(k - sp.k_s4_zero(s2, x, y)).max() < 1e-12

    def test_sampling_small(self):
        rep = sp.sample_sign_functions(points=20000, seed=1)
        for name in ("F", "H", "K"):
            assert rep[name].violations == 0
        again = sp.sample_sign_functions(points=20000, seed=1)
        assert again["F"].extreme == rep["F"].extreme

    def test_boundary_cases_small(self):
        rep = sp.sample_boundary_cases(samples=500, seed=2)
        assert len(rep) == 13
        for r in rep.values():
            assert r.identity_error < 1e-11
            assert r.violations == 0
