import dataclasses

import numpy as np
import pytest
from draws import threshold_params, valid_patch_params

from marine_reserves.equilibrium import (
    T_function,
    alpha_bound,
    cubic_residual,
    el_residual,
    global_equilibrium,
    normality_diagnosis,
    patches_equilibrium,
    patches_x1_star,
    patches_x2_star,
    r2_upper_bound,
    theta0,
)
from marine_reserves.growth import patch_growth
from marine_reserves.params import BioParams, DomainError, EconParams, State

# Frozen from a 40-digit polynomial-root oracle on the cubic.
X2_THETA4 = 0.37068121948092139
E_THETA4 = 0.036427765616299137
J_THETA4 = 0.21479082910986120
LAM_REQUIRED_THETA4 = -0.16197707807571634
X2_THETA20 = 0.19909761920719262
E_THETA20 = 0.069324842987584923
LAM_THETA20 = 1.2522337756149548
J_THETA20 = 1.4483148139261173
ALPHA_BOUND_THETA20 = 0.5801749271137027


class TestX1:
    def test_value(self, base_bio, base_econ):
        assert abs(patches_x1_star(base_bio, base_econ) - 0.21875) <= 1e-12

    def test_r1_equal_delta(self, base_econ):
        with pytest.raises(DomainError, match="no nontrivial equilibrium"):
            patches_x1_star(BioParams(0.05, 0.05, 0.5), base_econ)

    def test_small_discount_limit(self, base_bio):
        assert patches_x1_star(base_bio, EconParams(0.3, 2, 0.15, 1e-12)) == pytest.approx(0.25, abs=1e-12)


class TestX2:
    def test_theta4(self, base_bio, base_econ):
        assert patches_x2_star(base_bio, base_econ) == pytest.approx(X2_THETA4, abs=1e-12)

    def test_theta20(self, base_bio, theta20_econ):
        assert patches_x2_star(base_bio, theta20_econ) == pytest.approx(X2_THETA20, abs=1e-12)

    def test_limit_as_r1_approaches_delta(self, base_econ):
        # the right side vanishes, so the root tends to the positive root of the quadratic factor
        b, r2, d, th = 0.5, 0.05, 0.05, 4.0
        A, B = 2 * r2 * th / b**2, (th * (r2 - d) + r2) / b
        limit = (B + np.sqrt(B * B + 4 * A * d)) / (2 * A)
        roots = [patches_x2_star(BioParams(0.05 + eps, 0.05, 0.5), base_econ) for eps in (1e-2, 1e-4, 1e-6)]
        assert roots[0] > roots[1] > roots[2] > limit
        assert roots[2] == pytest.approx(limit, abs=1e-5)

    def test_requires_positive_cost(self, base_bio):
        with pytest.raises(DomainError):
            patches_x2_star(base_bio, EconParams(0.3, 2, 0.0, 0.05))

    def test_certificate_on_draws(self, rng):
        for _ in range(200):
            bio, econ = valid_patch_params(rng)
            x2 = patches_x2_star(bio, econ)
            assert x2 > 0
            assert abs(cubic_residual(x2, bio, econ)) <= 1e-10


class TestT:
    def test_zero(self, base_bio, base_econ):
        assert T_function(0.0, base_bio, base_econ) == 0.0

    def test_at_break_even(self, base_bio, base_econ):
        assert T_function(0.25, base_bio, base_econ) == pytest.approx(-0.009375, abs=1e-15)

    def test_at_equilibrium_density(self, base_bio, theta20_econ):
        # the cubic in x2 equals (1-alpha) T(x2/(1-alpha))
        z = patches_x2_star(base_bio, theta20_econ) / 0.5
        assert T_function(z, base_bio, theta20_econ) == pytest.approx(0.0984375, abs=1e-12)


class TestThresholds:
    def test_theta0(self, base_bio, base_econ):
        assert theta0(base_bio, base_econ) == pytest.approx(184 / 49, rel=1e-15)
        assert theta0(base_bio, base_econ) > 1

    def test_theta0_undefined(self, base_econ):
        with pytest.raises(DomainError, match="threshold undefined"):
            theta0(BioParams(0.3, 0.3, 0.5), base_econ)

    def test_alpha_bounds(self, base_bio, base_econ, theta20_econ):
        assert alpha_bound(base_bio, base_econ) == pytest.approx(1 / 49, rel=1e-13)
        assert alpha_bound(base_bio, theta20_econ) == pytest.approx(ALPHA_BOUND_THETA20, rel=1e-13)
        assert alpha_bound(base_bio, EconParams(0.2, 2, 0.15, 0.05)) is None
        assert alpha_bound(BioParams(0.1, 0.4, 0.5), theta20_econ) is None

    def test_r2_upper_bound_matches_threshold(self, base_bio, theta20_econ):
        # at r2 equal to the bound, theta is exactly theta0
        r2 = r2_upper_bound(base_bio, theta20_econ)
        assert theta0(dataclasses.replace(base_bio, r2=r2), theta20_econ) == pytest.approx(20.0, rel=1e-12)


class TestNormality:
    def test_never_normal(self, base_econ):
        d = normality_diagnosis(BioParams(0.4, 0.8, 0.5), base_econ)
        assert d.decision == "never_normal" and not d.direct_normal

    def test_never_normal_listed_example(self, theta20_econ):
        # r1 = delta is excluded, so use r1 just above it
        d = normality_diagnosis(BioParams(0.0501, 0.4, 0.5), theta20_econ)
        assert d.decision == "never_normal" and d.agrees

    def test_theta4(self, base_bio, base_econ):
        d = normality_diagnosis(base_bio, base_econ)
        assert d.decision == "not_normal" and d.agrees
        assert d.theta == pytest.approx(4.0) and d.alpha_bound == pytest.approx(1 / 49)

    def test_theta20(self, base_bio, theta20_econ):
        d = normality_diagnosis(base_bio, theta20_econ)
        assert d.decision == "normal" and d.direct_normal and not d.notes

    def test_equal_rates_reports_missing_bound(self, theta20_econ):
        d = normality_diagnosis(BioParams(0.3, 0.3, 0.5), theta20_econ)
        assert d.theta0 is None and d.decision == "never_normal"
        assert any("bound unavailable" in n for n in d.notes)

    def test_profitability_implication(self, rng):
        for _ in range(300):
            bio, econ = threshold_params(rng)
            rep = patches_equilibrium(bio, econ)
            if rep.normal:
                assert rep.J_star > 0 and rep.profitable


class TestPatchesEquilibrium:
    def test_theta20(self, base_bio, theta20_econ):
        rep = patches_equilibrium(base_bio, theta20_econ)
        assert rep.x1_star == 0.21875
        assert rep.x2_star == pytest.approx(X2_THETA20, abs=1e-12)
        assert rep.E_star == pytest.approx(E_THETA20, rel=1e-11)
        assert rep.lambda_star == pytest.approx(LAM_THETA20, rel=1e-11)
        assert rep.J_star == pytest.approx(J_THETA20, rel=1e-11)
        assert rep.normal and rep.profitable and rep.feasible
        assert rep.finding("rhs_residual") < 1e-8

    def test_theta4_infeasible(self, base_bio, base_econ):
        rep = patches_equilibrium(base_bio, base_econ)
        assert not rep.normal and not rep.feasible and rep.lambda_star is None
        assert rep.finding("lambda_star") == pytest.approx(LAM_REQUIRED_THETA4, rel=1e-11)
        assert rep.E_star == pytest.approx(E_THETA4, rel=1e-11)
        assert rep.J_star == pytest.approx(J_THETA4, rel=1e-11)

    def test_r1_below_delta(self, base_econ):
        with pytest.raises(DomainError, match="no nontrivial equilibrium"):
            patches_equilibrium(BioParams(0.04, 0.05, 0.5), base_econ)

    def test_effort_above_bound_flagged(self, base_bio):
        econ = EconParams(1.5, 2, 0.15, 0.05, e_max=0.05)
        rep = patches_equilibrium(base_bio, econ)
        assert rep.normal and not rep.feasible
        assert rep.finding("effort_out_of_bounds") == pytest.approx(E_THETA20, rel=1e-11)

    def test_invariants_on_draws(self, rng):
        for _ in range(300):
            bio, econ = valid_patch_params(rng)
            rep = patches_equilibrium(bio, econ)
            a = bio.alpha
            d1, d2 = rep.x1_star / a, rep.x2_star / (1 - a)
            if rep.feasible:
                assert 0 <= rep.E_star <= econ.e_max and rep.lambda_star >= 0
            assert rep.normal == (d2 <= d1 * (1 + 1e-12))
            if abs(d2 * econ.theta - 1) > 1e-9:
                assert rep.profitable == (d2 > 1 / econ.theta)


class TestGlobalEquilibrium:
    def test_reported_point(self, base_bio, base_econ):
        rep = global_equilibrium(base_bio, base_econ)
        assert (rep.x1_star, rep.x2_star) == pytest.approx((0.875, 0.125), abs=1e-12)
        assert rep.E_star == 0 and rep.lambda_star == 0 and rep.J_star == 0
        assert rep.normal and rep.feasible

    def test_theta_one(self, base_bio):
        rep = global_equilibrium(base_bio, EconParams(0.075, 2, 0.15, 0.05))
        assert (rep.x1_star, rep.x2_star) == pytest.approx((0.5, 0.5), abs=1e-15)
        assert rep.lambda_star is None and rep.finding("lambda_indeterminate")

    def test_large_price_limit(self, base_bio):
        rep = global_equilibrium(base_bio, EconParams(1e9, 2, 0.15, 0.05))
        assert 0 < rep.x2_star < 1e-9 and rep.x1_star == pytest.approx(1.0)

    def test_nonpositive_interior(self, base_bio):
        with pytest.raises(DomainError, match="interior equilibrium nonpositive"):
            global_equilibrium(base_bio, EconParams(0.03, 2, 0.15, 0.05))

    def test_unprofitable_is_not_normal(self, base_bio):
        rep = global_equilibrium(base_bio, EconParams(0.06, 2, 0.15, 0.05))
        assert not rep.normal and not rep.profitable


class TestEulerLagrange:
    def test_patches_at_equilibrium(self, base_bio, theta20_econ, base_econ):
        for econ in (base_econ, theta20_econ):
            rep = patches_equilibrium(base_bio, econ)
            assert max(map(abs, el_residual(rep.state, base_bio, econ, "patches"))) <= 1e-9

    def test_global_at_equilibrium_exact(self, base_bio, base_econ):
        assert el_residual(State(0.875, 0.125), base_bio, base_econ, "global") == (0.0, 0.0)

    def test_global_contradiction(self, base_bio, base_econ):
        r, d = 0.28739, 0.05
        z = (r - d) / (2 * r)
        res1, res2 = el_residual(State(z - 0.05, 0.05), base_bio, base_econ, "global")
        assert res1 == pytest.approx((r - d) * (r + d) / (4 * r), abs=1e-15)
        assert res2 == pytest.approx(0.0, abs=1e-15)

    def test_no_patch_equilibrium_on_break_even_branch(self, base_bio, base_econ):
        # with x2 at c(1-alpha)/(pq) the first residual is F1(x1) + F2(x2) > 0 on [0, alpha]
        x2 = global_equilibrium(base_bio, base_econ).x2_star
        x1 = np.linspace(0.0, 0.5, 10001)
        res = [el_residual(State(a, x2), base_bio, base_econ, "patches")[0] for a in x1]
        assert min(res) >= patch_growth(x2, 0.05, 0.5) > 0

    def test_unknown_variant(self, base_bio, base_econ):
        with pytest.raises(DomainError):
            el_residual(State(0.1, 0.1), base_bio, base_econ, "open")
