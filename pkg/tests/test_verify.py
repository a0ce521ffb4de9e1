"""Analytic solutions, error norms, convergence studies and equivalence checks."""

import numpy as np
import pytest

from mrtlb import verify
from mrtlb.errors import ShapeMismatch
from mrtlb.kinetic import Jet
from mrtlb.macro_fd import SchemeKind
from mrtlb.params import DiffusionProblem, Discretization, derive_fourth_order


class TestAnalytic:
    @pytest.mark.parametrize("name", ["example1", "example2", "example3"])
    def test_pde_residual(self, name):
        sol = verify.make_example(name, 0.1)
        rng = np.random.default_rng(0)
        pb = sol.problem
        x = pb.x0 + rng.uniform(0, pb.lx, 10_000)
        y = pb.y0 + rng.uniform(0, pb.ly, 10_000)
        t = rng.uniform(0, 0.5, 10_000)
        assert np.abs(sol.residual(x, y, t)).max() < 1e-10

    def test_residual_detects_wrong_problem(self):
        good = verify.make_example("example3", 0.1)
        bad = verify.AnalyticSolution("bad", verify.make_example("example3", 0.2).problem,
                                      good.phi, good.jet, good.phi_mp)
        assert np.abs(bad.residual(0.3, 0.2, 0.1)) > 1e-3

    @pytest.mark.parametrize("name", ["example1", "example2", "example3"])
    def test_jet_matches_phi(self, name):
        sol = verify.make_example(name, 0.07)
        rng = np.random.default_rng(1)
        x, y, t = rng.uniform(0, 1, (3, 50))
        h = 1e-5
        j = sol.jet(x, y, t)
        assert np.allclose(j.phi, sol.phi(x, y, t), atol=1e-15)
        assert np.allclose(j.x, (sol.phi(x + h, y, t) - sol.phi(x - h, y, t)) / (2 * h), atol=1e-8)
        assert np.allclose(j.t, (sol.phi(x, y, t + h) - sol.phi(x, y, t - h)) / (2 * h), atol=1e-7)

    def test_unknown(self):
        with pytest.raises(ShapeMismatch):
            verify.make_example("example9", 0.1)


class TestErrors:
    def test_rmse(self):
        a = np.random.default_rng(2).standard_normal((5, 7))
        assert verify.rmse(a, a) == 0.0
        assert verify.rmse(a + 0.25, a) == pytest.approx(0.25)
        with pytest.raises(ShapeMismatch):
            verify.rmse(a, a[:, :3])

    def test_rates(self):
        assert np.allclose(verify.convergence_rates([16.0, 1.0, 1 / 16]), [4.0, 4.0])

    def test_report_summaries(self):
        dxs = [0.1, 0.05, 0.025]
        rep = verify.ConvergenceReport("x", "example1", 0.1, dxs, [0.1, 0.025, 0.00625],
                                       [1.0, 2.0**-4, 2.0**-7.5])
        assert rep.final_pair == pytest.approx(3.5)
        assert rep.endpoint == pytest.approx(3.75)
        assert 3.5 < rep.lsq_slope < 4.0
        assert list(rep.rows())[1] == (0.05, 0.025, 2.0**-4)

    def test_ladder(self):
        lad = verify.ladder(0.1, 0.1, 4)
        assert len(lad) == 4
        for (dx, dt), (dx2, dt2) in zip(lad, lad[1:]):
            assert dx2 == dx / 2 and dt2 == dt / 4
            assert dx * dx / dt == pytest.approx(dx2 * dx2 / dt2)


class TestStudies:
    def test_first_rung_example1_lb(self):
        res = verify.simulate("lb", "example1", 0.001, 0.1, 0.1, 10.0)
        assert res.rmse == pytest.approx(6.7249e-7, rel=0.1)

    def test_simulate_rejects_fractional_steps(self):
        with pytest.raises(ValueError):
            verify.simulate("lb", "example1", 0.1, 0.1, 0.3, 1.0)

    def test_snapshots(self):
        snaps = {0: None, 3: None}
        res = verify.simulate("flfd", "example1", 0.1, 0.2, 0.1, 0.5, snapshots=snaps)
        assert res.steps == 5
        assert all(v is not None for v in snaps.values())

    def test_flfd_rate_and_scaling(self):
        rep = verify.convergence_study("flfd", "example1", 0.1, 0.1, 0.1, 1.0, 3)
        assert rep.rmses[0] / rep.rmses[1] > 12 and rep.rmses[1] / rep.rmses[2] < 20
        assert 3.5 <= rep.pairwise[-1] <= 4.5

    def test_perturbed_s4_is_second_order(self):
        def broken(eps, pb, dt):
            r = derive_fourth_order(eps, 1.0)
            return r.with_(s4=r.s4 + 0.1)

        rep = verify.convergence_study("flfd", "example1", 0.1, 0.1, 0.1, 1.0, 3, rset_fn=broken)
        assert 1.7 <= rep.final_pair <= 2.3


class TestEquivalence:
    def test_example1_flfd(self):
        assert verify.example1_equivalence(60, 1.0).max_deviation < 1e-10

    def test_example1_slfd(self):
        assert verify.example1_equivalence(60, 1.2).max_deviation < 1e-9

    def test_constant_field_exact(self):
        pb = DiffusionProblem(kappa=0.1, lx=1.0, ly=1.0)
        disc = Discretization.for_problem(pb, 0.125, 0.01)
        rep = verify.equivalence_check(pb, derive_fourth_order(0.1, 1.2), SchemeKind.SLFD, 40,
                                       disc, np.full((8, 8), 1.5))
        assert rep.max_deviation < 1e-13

    @pytest.mark.parametrize("s5, kind", [(1.0, SchemeKind.FLFD), (1.2, SchemeKind.SLFD)])
    def test_drift_at_most_linear(self, s5, kind):
        pb = DiffusionProblem(kappa=0.1, lx=2.0, ly=2.0)
        disc = Discretization.for_problem(pb, 0.1, 0.01)
        x, y = np.meshgrid(*disc.coordinates(pb), indexing="ij")
        phi0 = np.sin(np.pi * x) * np.cos(np.pi * y) + 0.5 * np.cos(2 * np.pi * x)
        rep = verify.equivalence_check(pb, derive_fourth_order(0.1, s5), kind, 1000, disc, phi0)
        dev = np.maximum.accumulate(rep.deviations)
        k = np.arange(1, dev.size + 1)
        early_rate = (dev[:100] / k[:100]).max()
        assert np.all(dev[100:] <= 2 * early_rate * k[100:])

    def test_drift_example1(self):
        rep = verify.example1_equivalence(1000, 1.0, n=20)
        assert rep.max_deviation < 1e-10

    def test_jet_initialised(self):
        sol = verify.example1(0.1)
        disc = Discretization.for_problem(sol.problem, 0.1, 0.1)
        xx, yy = np.meshgrid(*disc.coordinates(sol.problem), indexing="ij")
        jet = sol.jet(xx, yy, 0.0)
        assert isinstance(jet, Jet)
        rep = verify.equivalence_check(sol.problem, derive_fourth_order(0.1, 1.0), SchemeKind.FLFD,
                                       50, disc, jet)
        assert rep.deviations.size == 50 - 3


class TestTables:
    def test_catalogue(self):
        assert len(verify.REFERENCE_TABLES) == 8
        for spec in verify.REFERENCE_TABLES.values():
            assert len(spec.rows) == 4
            assert all(len(v) == 5 for v in spec.rows.values())

    def test_comma_cells(self):
        assert verify.REFERENCE_TABLES["ex2_lb"].rows[0.04][0] == 8.8311e-8
        assert verify.REFERENCE_TABLES["ex1_flfd"].rows[0.15][1] == 7.7574e-7

    def test_row_result(self):
        spec = verify.REFERENCE_TABLES["ex1_flfd"]
        rep = verify.ConvergenceReport("flfd", "example1", 0.1, [0.1, 0.05], [0.1, 0.025],
                                       [spec.rows[0.1][0], spec.rows[0.1][1]])
        row = verify.TableRowResult("ex1_flfd", 0.1, rep, spec.rows[0.1][:2], spec.rows[0.1][4])
        assert row.rmse_ratios == [1.0, 1.0] and all(row.rmse_ok)
        assert row.cr == pytest.approx(np.log2(spec.rows[0.1][0] / spec.rows[0.1][1]))

    def test_reproduce_subset(self):
        rows = verify.reproduce_tables(["ex1_flfd"], rungs=2)
        assert len(rows) == 4
        assert all(r.rmse_ok[0] for r in rows)
