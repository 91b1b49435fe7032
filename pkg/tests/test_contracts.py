"""Contract functions: alpha classification, payments, induced expert rules."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from elicit import (
    AlphaRangeError,
    AlphaVerdict,
    ArbitrageFreeContract,
    Distribution,
    IndependentScoring,
    LogRule,
    QuadraticRule,
    ReportProfile,
    ZeroSumPair,
    coalition_totals,
    expected_reward,
    expert_reward,
    leave_one_out_mean,
    properness_probe,
    quadratic_score,
    threshold_general,
    threshold_two_outcome,
    validate_alpha,
)
from elicit.contracts import InducedExpertRule
from elicit.simplex import Coalition

from conftest import distributions, profiles

ALL_HALF = ReportProfile.of(("1/2", "1/2"), ("1/2", "1/2"), ("1/2", "1/2"))

alphas = st.fractions(
    min_value=Fraction(-100), max_value=Fraction(100), max_denominator=8
)


def reference_reward(profile: ReportProfile, i: int, j: int, alpha: Fraction):
    """Independent restatement of the family's payment formula."""
    loo = leave_one_out_mean(profile, i)
    return (
        quadratic_score(profile.reports[i], j)
        - (profile.m - 1) ** 2 * quadratic_score(loo, j)
        + alpha * loo[j]
    )


class TestThresholds:
    def test_known_values(self):
        assert threshold_two_outcome(3, Fraction(16)) == 0
        assert threshold_general(3, Fraction(16)) == -2
        assert threshold_two_outcome(2, Fraction(-4)) == 2
        assert threshold_general(2, Fraction(-4)) == 3

    @given(st.integers(2, 8), alphas)
    def test_formulas(self, m, alpha):
        assert threshold_two_outcome(m, alpha) == m - 1 - alpha / (4 * (m - 1))
        assert threshold_general(m, alpha) == m - 1 - alpha / (2 * (m - 1))

    @given(st.integers(2, 8), alphas)
    def test_regime_equivalences(self, m, alpha):
        # alpha < 0 iff the general threshold exceeds m - 1;
        # alpha >= 4 (m-1)^2 iff the two-outcome threshold is <= 0.
        assert (alpha < 0) == (threshold_general(m, alpha) > m - 1)
        assert (alpha >= 4 * (m - 1) ** 2) == (threshold_two_outcome(m, alpha) <= 0)


class TestValidateAlpha:
    @pytest.mark.parametrize(
        "alpha,verdict",
        [
            (Fraction(-1), AlphaVerdict.VALID_NEGATIVE),
            (Fraction(-1, 1000), AlphaVerdict.VALID_NEGATIVE),
            (Fraction(0), AlphaVerdict.INVALID),
            (Fraction(15), AlphaVerdict.INVALID),
            (Fraction(16), AlphaVerdict.VALID_LARGE),
            (Fraction(1000), AlphaVerdict.VALID_LARGE),
        ],
    )
    def test_verdicts_for_m3_n2(self, alpha, verdict):
        check = validate_alpha(alpha, 3, 2)
        assert check.verdict is verdict
        assert check.valid == (verdict is not AlphaVerdict.INVALID)

    @given(st.integers(2, 6), st.integers(2, 5))
    def test_cutoff_is_inclusive(self, m, n):
        cutoff = 2 * (m - 1) ** 2 * n
        assert validate_alpha(cutoff, m, n).verdict is AlphaVerdict.VALID_LARGE
        assert validate_alpha(cutoff - Fraction(1, 10), m, n).verdict is (
            AlphaVerdict.INVALID
        )
        assert validate_alpha(cutoff, m, n).lower_safe_bound == cutoff

    def test_rejects_floats_and_bad_shapes(self):
        with pytest.raises(TypeError, match="float"):
            validate_alpha(0.5, 3, 2)
        with pytest.raises(ValueError):
            validate_alpha(1, 1, 2)
        with pytest.raises(ValueError):
            validate_alpha(1, 2, 1)


class TestIndependentScoring:
    @given(profiles())
    def test_pays_each_expert_their_own_score(self, profile):
        contract = IndependentScoring(rule=QuadraticRule())
        for j in range(profile.n):
            pay = contract.evaluate(profile, j)
            assert pay == tuple(
                quadratic_score(r, j) for r in profile.reports
            )

    def test_expert_view_ignores_opponents(self):
        profile = ReportProfile.of(("2/5", "3/5"), ("1/2", "1/2"))
        contract = IndependentScoring(rule=QuadraticRule())
        view = contract.expert_view(profile, 0)
        d = Distribution.of("1/4", "3/4")
        assert view.score(d, 1) == quadratic_score(d, 1)

    def test_exactness_tracks_rule(self):
        assert IndependentScoring(rule=QuadraticRule()).exact
        assert not IndependentScoring(rule=LogRule()).exact


class TestZeroSumPair:
    def test_antisymmetric_payments(self):
        profile = ReportProfile.of(("2/5", "3/5"), ("9/10", "1/10"))
        contract = ZeroSumPair()
        for j in range(2):
            a, b = contract.evaluate(profile, j)
            assert a == -b
            diff = quadratic_score(profile.reports[0], j) - quadratic_score(
                profile.reports[1], j
            )
            assert a == diff

    def test_requires_two_experts(self):
        contract = ZeroSumPair()
        with pytest.raises(ValueError, match="exactly 2 experts"):
            contract.evaluate(ALL_HALF, 0)


class TestArbitrageFreeContract:
    def test_alpha_coerced_exactly(self):
        assert ArbitrageFreeContract(alpha=16).alpha == Fraction(16)
        assert ArbitrageFreeContract(alpha="5/3").alpha == Fraction(5, 3)
        with pytest.raises(TypeError, match="float"):
            ArbitrageFreeContract(alpha=0.5)

    def test_canonical_all_half_rewards(self):
        contract = ArbitrageFreeContract(alpha=16)
        for j in range(2):
            assert contract.evaluate(ALL_HALF, j) == (Fraction(13, 2),) * 3

    @given(profiles(), alphas)
    def test_matches_reference_formula(self, profile, alpha):
        contract = ArbitrageFreeContract(alpha=alpha, permissive=True)
        for j in range(profile.n):
            pay = contract.evaluate(profile, j)
            for i in range(profile.m):
                assert pay[i] == reference_reward(profile, i, j, alpha)

    def test_invalid_alpha_blocked_without_permissive(self):
        contract = ArbitrageFreeContract(alpha=3)
        with pytest.raises(AlphaRangeError, match="arbitrage-prone band"):
            contract.evaluate(ALL_HALF, 0)
        assert not contract.check(3, 2).valid
        permissive = ArbitrageFreeContract(alpha=3, permissive=True)
        permissive.evaluate(ALL_HALF, 0)

    def test_needs_two_experts(self):
        contract = ArbitrageFreeContract(alpha=-1)
        with pytest.raises(ValueError):
            contract.evaluate(ReportProfile.of(("1/2", "1/2")), 0)

    @given(profiles(max_m=3, max_n=3), alphas, st.data())
    def test_expert_view_tracks_own_report(self, profile, alpha, data):
        # The induced single-expert rule must reproduce the full payment
        # for any own-report swap with the opponents held fixed.
        contract = ArbitrageFreeContract(alpha=alpha, permissive=True)
        i = data.draw(st.integers(0, profile.m - 1))
        view = contract.expert_view(profile, i)
        replacement = data.draw(distributions(n=profile.n))
        swapped = profile.replace({i: replacement})
        for j in range(profile.n):
            assert view.score(replacement, j) == contract.evaluate(swapped, j)[i]

    def test_induced_rule_is_strictly_proper(self):
        contract = ArbitrageFreeContract(alpha=16)
        view = contract.expert_view(ALL_HALF, 0)
        belief = Distribution.of("2/5", "3/5")
        probe = properness_probe(view, belief, steps=5)
        assert probe.unique and probe.argmax == belief


class TestInducedExpertRule:
    def test_offsets_shift_quadratic_score(self):
        rule = InducedExpertRule(offsets=(Fraction(3), Fraction(-1, 2)))
        d = Distribution.of("2/5", "3/5")
        assert rule.score(d, 0) == quadratic_score(d, 0) + 3
        assert rule.score(d, 1) == quadratic_score(d, 1) - Fraction(1, 2)


class TestRewardHelpers:
    @given(profiles(max_m=3, max_n=3), alphas)
    def test_expert_and_expected_reward(self, profile, alpha):
        contract = ArbitrageFreeContract(alpha=alpha, permissive=True)
        for i in range(profile.m):
            belief = profile.reports[i]
            expectation = expected_reward(contract, profile, i, belief)
            direct = sum(
                belief[j] * expert_reward(contract, profile, i, j)
                for j in range(profile.n)
                if belief[j] != 0
            )
            assert expectation == direct

    def test_coalition_totals_sum_member_payments(self):
        contract = ArbitrageFreeContract(alpha=16)
        coalition = Coalition.of([0, 2])
        totals = coalition_totals(contract, ALL_HALF, coalition)
        assert totals == (Fraction(13), Fraction(13))

    def test_expected_reward_skips_ruled_out_outcomes(self):
        contract = IndependentScoring(rule=LogRule())
        profile = ReportProfile.of(("1", "0"), ("1/2", "1/2"))
        assert expected_reward(
            contract, profile, 0, Distribution.of(1, 0)
        ) == pytest.approx(0.0)
