import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from nlqm.dynamics import IntegratorConfig, coupled_field, integrate
from nlqm.elliptic import complete_K
from nlqm.errors import DomainError, InadmissibleError, SingularityError
from nlqm.params import ModelParams
from nlqm.solutions import (
    Family,
    SolutionFamily,
    abel_grid,
    abel_poles,
    closed_form_initial_state,
    eval_abel_solution,
    eval_sn_family,
    eval_soliton,
    sech2,
    soliton_shape,
    verify_residual,
)

SN = SolutionFamily.sn(0.5)
B0 = SolutionFamily.soliton_b0(1.0, 1.0, 4.0)
MU0 = SolutionFamily.soliton_mu0(-2.0, 1.0, 10.0)
GEN = SolutionFamily.soliton_general(1.0, -2.0, 1.0)
T = np.linspace(-10, 10, 401)


class TestFamilies:
    def test_parse_aliases(self):
        assert Family.parse("sn") is Family.SN
        assert Family.parse("abel") is Family.ABEL
        assert Family.parse("soliton-b0") is Family.SOLITON_B0
        with pytest.raises(DomainError):
            Family.parse("kink")

    def test_sn_fixes_params(self):
        p = SN.params
        assert p.b == -1.0 and p.N ** 2 == pytest.approx(2.5, rel=1e-15)

    @pytest.mark.parametrize("fam, msg", [
        (SolutionFamily.soliton_b0(1.0, 1.0, 10.0), "E < 8mu^2"),
        (SolutionFamily.soliton_mu0(-2.0, 1.0, -1.0), "E > 0"),
        (SolutionFamily.soliton_general(1.0, -1.0, 1.0), "b + mu"),
        (SolutionFamily.sn(1.5), "0 < mu < 1"),
        (SolutionFamily(Family.SN, ModelParams(0.5, -1.0, 1.0)), "N^2"),
        (SolutionFamily(Family.ABEL, ModelParams(1.0, 0.3, 1.0), 1.0), "b = -mu/2 or b = mu"),
        (SolutionFamily(Family.ABEL, ModelParams(1.0, -0.5, 1.0)), "finite constant B"),
    ])
    def test_inadmissible(self, fam, msg):
        assert not fam.is_valid
        with pytest.raises(InadmissibleError, match=msg.replace("^", r"\^").replace("+", r"\+")):
            fam.check()


class TestSnFamily:
    def test_examples(self):
        y, x = eval_sn_family(SN, 0.0)
        assert y == 0.0 and x == pytest.approx(0.0625, abs=1e-15)
        y, x = eval_sn_family(SN, complete_K(0.5))
        assert y == pytest.approx(1.0, abs=1e-14) and x == pytest.approx(0.1875, abs=1e-14)

    def test_coupled_residual_by_finite_differences(self):
        t = np.linspace(0, 10, 201)
        h = 1e-3
        p = SN.params
        ev = lambda s: np.array(eval_sn_family(SN, s))
        d = (-ev(t + 2 * h) + 8 * ev(t + h) - 8 * ev(t - h) + ev(t - 2 * h)) / (12 * h)
        dy, dx = coupled_field(p, *ev(t))
        assert np.max(np.abs(d[0] - dy)) <= 1e-8
        assert np.max(np.abs(d[1] - dx)) <= 1e-8

    @pytest.mark.parametrize("form, method", [("lienard", "analytic"), ("coupled", "analytic"),
                                              ("levinson", "central-difference")])
    def test_verify(self, form, method):
        grid = np.linspace(0, 10, 400)
        rep = verify_residual(SN, grid, form)
        assert rep.derivative_method == method
        assert rep.passed
        assert rep.max_abs_residual <= (1e-8 if method == "analytic" else 1e-6)

    @pytest.mark.parametrize("mu", [0.2, 0.5, 0.8, 0.95])
    def test_all_admissible_moduli(self, mu):
        assert verify_residual(SolutionFamily.sn(mu), T).max_abs_residual <= 1e-8

    def test_x_of_sn_family_stays_positive(self):
        # x = |gamma|^2 must be non-negative along the family
        for mu in (0.2, 0.5, 0.8):
            assert np.all(eval_sn_family(SolutionFamily.sn(mu), T)[1] > 0)


class TestAbel:
    @pytest.mark.parametrize("N, B, xi, want", [(1.0, 1.0, 0.0, 1.0), (1.0, 1.0, 1.0, 1.0), (2.0, 2.0, 0.0, 1.0),
                                                (2.0, 1.0, -1.0, -2.0)])
    def test_examples(self, N, B, xi, want):
        assert eval_abel_solution(N, B, xi) == want

    @pytest.mark.parametrize("B, want", [(1.0, [-math.sqrt(0.5)]), (2.0, [-2 / math.sqrt(3), -2 / math.sqrt(5)]),
                                         (-2.0, [2 / math.sqrt(5), 2 / math.sqrt(3)]), (0.0, [0.0])])
    def test_poles(self, B, want):
        poles = abel_poles(1.0, B)
        assert poles == pytest.approx(want, rel=1e-15)
        for c in poles:
            with pytest.raises(SingularityError) as ei:
                eval_abel_solution(1.0, B, np.array([0.5, c]))
            assert ei.value.location == c

    @given(st.floats(-5, 5).filter(lambda B: abs(B) > 1e-3 and abs(abs(B) - 1) > 1e-3))
    def test_poles_zero_the_denominator(self, B):
        for c in abel_poles(1.0, B):
            assert abs(c + B * math.sqrt(abs(c * c - 1))) <= 1e-12 * max(1.0, abs(B))

    def test_symbolic_bernoulli(self):
        # both smooth pieces of the solution satisfy the Bernoulli equation exactly
        mu, N, B, z = sp.symbols("mu N B z", positive=True)
        for s in (mu, 2 * mu):
            xi = z / (s * N)
            for rad in (1 - xi**2, xi**2 - 1):
                y = N / (xi + B * sp.sqrt(rad))
                res = sp.diff(y, z) - (y * z - s * y**2) / (s * s * N * N - z * z)
                assert sp.simplify(res) == 0

    @pytest.mark.parametrize("N, B", [(1.0, 1.0), (1.0, 2.0), (2.0, 1.0), (2.0, 2.0), (1.0, -0.5)])
    @pytest.mark.parametrize("branch", ["b-eq-minus-half-mu", "b-eq-mu"])
    def test_verify(self, N, B, branch):
        fam = SolutionFamily.abel(N, B, mu=1.0, branch=branch)
        rep = verify_residual(fam, abel_grid(N, B))
        assert rep.derivative_method == "central-difference"
        assert rep.max_scaled_residual <= 1e-6
        assert rep.passed

    def test_verify_rejects_points_on_a_cusp(self):
        with pytest.raises(SingularityError):
            verify_residual(SolutionFamily.abel(1.0, 1.0), np.array([0.0, 1.0]))

    def test_grid_excludes_special_points(self):
        g = abel_grid(1.0, 2.0)
        for c in [-1.0, 1.0] + abel_poles(1.0, 2.0):
            assert np.min(np.abs(g - c)) > 1e-3

    def test_not_a_time_solution(self):
        with pytest.raises(DomainError):
            closed_form_initial_state(SolutionFamily.abel(1.0, 1.0), "lienard")


class TestSolitons:
    @pytest.mark.parametrize("fam, x0, kappa", [(GEN, 0.25, -1.0), (MU0, 0.5625, 3.0), (B0, 0.5, 1.0)])
    def test_examples(self, fam, x0, kappa):
        assert eval_soliton(fam, 0.0) == x0
        A, k = soliton_shape(fam)
        assert k == kappa

    def test_symbolic_solutions(self):
        t, mu, b, N, E = sp.symbols("t mu b N E", positive=True)

        def lev(x, mu, b):
            s = mu + b
            lam = (2 * b + 3 * mu) / (2 * s)
            return sp.diff(x, t, 2) - (lam * sp.diff(x, t) ** 2 / x - s * (2 * mu * N**2 * x + 8 * b * x**2))

        sech2_ = lambda u: 1 / sp.cosh(u) ** 2
        cases = [
            (2 * mu**2 * N**2 / (8 * mu**2 - E) * sech2_(N * mu * t), mu, 0),
            ((E + 2 * b**2 * N**2) / (8 * b**2) * sech2_(sp.sqrt(E / 2 + b**2 * N**2) * t), 0, b),
            (N**2 / 4 * sech2_((mu + b) * N * t), mu, b),
        ]
        for x, m, bb in cases:
            res = lev(x, m, bb).rewrite(sp.exp)
            assert sp.simplify(res) == 0

    @pytest.mark.parametrize("fam", [B0, MU0, GEN, SolutionFamily.soliton_general(0.5, 0.25, 2.0),
                                     SolutionFamily.soliton_b0(2.0, 0.5, -3.0)])
    def test_verify(self, fam):
        rep = verify_residual(fam, T)
        assert rep.derivative_method == "analytic"
        assert rep.max_abs_residual <= 1e-8

    def test_soliton_needs_levinson(self):
        with pytest.raises(DomainError):
            verify_residual(GEN, T, "coupled")

    def test_equilibrium_constant_profile(self):
        # x = -mu N^2 / (4b) with y = 0 is a fixed point; its constant profile solves the x-equation
        from nlqm.dynamics import rhs_levinson_x
        p = ModelParams(1.0, -2.0, 1.0)
        assert abs(rhs_levinson_x(p, 0.125, 0.0)) <= 1e-15

    def test_b0_rejected_outside_domain(self):
        with pytest.raises(InadmissibleError, match="E < 8mu"):
            eval_soliton(SolutionFamily.soliton_b0(1.0, 1.0, 10.0), 0.0)

    @given(st.floats(-50, 50))
    def test_even(self, t):
        for fam in (B0, MU0, GEN):
            assert eval_soliton(fam, t) == eval_soliton(fam, -t)

    def test_decay(self):
        for fam in (B0, MU0, GEN):
            A, k = soliton_shape(fam)
            t = np.linspace(0, 30 / abs(k), 300)
            x = eval_soliton(fam, t)
            assert np.all(np.diff(x) <= 0)
            assert eval_soliton(fam, 20 / abs(k)) < 1e-16 * A
            assert np.all(x > 0)

    def test_sech2(self):
        assert sech2(0.0) == 1.0
        assert sech2(800.0) == 0.0
        assert sech2(1.3) == pytest.approx(1 / math.cosh(1.3) ** 2, rel=1e-15)


class TestCrossCheck:
    @pytest.mark.parametrize("fam, form", [(SN, "lienard"), (SN, "coupled"), (SN, "levinson"),
                                           (B0, "levinson"), (MU0, "levinson"), (GEN, "levinson")])
    def test_integration_reproduces_closed_form(self, fam, form):
        init = closed_form_initial_state(fam, form)
        tr = integrate(form, fam.params, init, IntegratorConfig(5.0, abs_tol=1e-12, rel_tol=1e-12))
        if fam.tag is Family.SN:
            y, x = eval_sn_family(fam, tr.t)
            want = {"lienard": y, "coupled": y, "levinson": x}[form]
            got = tr.states[:, 0]
        else:
            want, got = eval_soliton(fam, tr.t), tr.states[:, 0]
        assert np.max(np.abs(got - want)) <= 1e-6
