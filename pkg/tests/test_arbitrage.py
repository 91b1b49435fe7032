"""Arbitrage certificates, searches, and the uniform-report interval."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from elicit import (
    ArbitrageFreeContract,
    CertificateKind,
    Coalition,
    Distribution,
    GridSearch,
    IndependentScoring,
    QuadraticRule,
    RandomSearch,
    ReportProfile,
    check_dominance,
    check_expected_arbitrage,
    coalition_totals,
    mean_collusion,
    search_arbitrage,
    uniform_report_arbitrage_interval,
)
from elicit.arbitrage import (
    ArbitrageInterval,
    DeviationMismatchError,
    ReconstructionError,
    SqrtExpr,
    ensure_agreement_outside,
    profile_with_coalition_sums,
)

from conftest import profiles_with_coalitions

INTRO = ReportProfile.of(("2/5", "3/5"), ("1/2", "1/2"), ("9/10", "1/10"))
ALL_HALF = ReportProfile.of(("1/2", "1/2"), ("1/2", "1/2"), ("1/2", "1/2"))
QUADRATIC = IndependentScoring(rule=QuadraticRule())


def uniform_deviation(profile, coalition, report):
    return profile.replace({i: report for i in coalition})


def unchanged_copy(profile):
    return profile.replace({})


class TestAgreementGuard:
    def test_accepts_coalition_only_changes(self):
        dev = uniform_deviation(INTRO, Coalition.of([0, 1]), Distribution.of(1, 0))
        ensure_agreement_outside(INTRO, dev, Coalition.of([0, 1]))

    def test_rejects_outside_changes(self):
        dev = INTRO.replace({2: Distribution.of(1, 0)})
        with pytest.raises(DeviationMismatchError, match="expert 3"):
            ensure_agreement_outside(INTRO, dev, Coalition.of([0, 1]))

    def test_rejects_shape_mismatch(self):
        narrow = ReportProfile.of(("1/2", "1/2"), ("1/2", "1/2"))
        with pytest.raises(DeviationMismatchError, match="shape"):
            ensure_agreement_outside(INTRO, narrow, Coalition.of([0]))


class TestCheckDominance:
    def test_intro_mean_collusion_certifies(self):
        coalition = Coalition.full(3)
        deviation = mean_collusion(INTRO, coalition)
        cert = check_dominance(QUADRATIC, INTRO, deviation, coalition)
        assert cert is not None
        assert cert.kind is CertificateKind.DOMINANCE
        assert cert.exact
        assert cert.deltas == (Fraction(7, 25), Fraction(7, 25))

    def test_identical_deviation_yields_none(self):
        coalition = Coalition.full(3)
        assert (
            check_dominance(QUADRATIC, INTRO, unchanged_copy(INTRO), coalition)
            is None
        )

    def test_losing_somewhere_yields_none(self):
        coalition = Coalition.of([0, 1])
        deviation = uniform_deviation(INTRO, coalition, Distribution.of(1, 0))
        assert check_dominance(QUADRATIC, INTRO, deviation, coalition) is None

    def test_valid_alpha_never_certifies_mean_collusion(self):
        contract = ArbitrageFreeContract(alpha=-1)
        coalition = Coalition.full(3)
        deviation = mean_collusion(INTRO, coalition)
        assert check_dominance(contract, INTRO, deviation, coalition) is None


class TestExpectedArbitrage:
    def test_canonical_alpha16_case(self):
        contract = ArbitrageFreeContract(alpha=16)
        coalition = Coalition.full(3)
        deviation = uniform_deviation(ALL_HALF, coalition, Distribution.of(1, 0))
        assert check_dominance(contract, ALL_HALF, deviation, coalition) is None
        cert = check_expected_arbitrage(contract, ALL_HALF, deviation, coalition)
        assert cert is not None
        assert cert.kind is CertificateKind.EXPECTED
        assert cert.deltas == (Fraction(39, 2), Fraction(-21, 2))
        assert cert.member_expected_gains() == (Fraction(9, 2),) * 3

    def test_no_expected_gain_for_identical_reports(self):
        contract = ArbitrageFreeContract(alpha=16)
        coalition = Coalition.full(3)
        assert (
            check_expected_arbitrage(
                contract, ALL_HALF, unchanged_copy(ALL_HALF), coalition
            )
            is None
        )

    @given(profiles_with_coalitions(max_m=4, max_n=3))
    def test_dominance_implies_expected_when_beliefs_allow(self, pc):
        # A sure gain is an expected gain whenever each member believes
        # some strictly improved outcome has positive probability.
        profile, coalition = pc
        deviation = mean_collusion(profile, coalition)
        cert = check_dominance(QUADRATIC, profile, deviation, coalition)
        if cert is None:
            return
        strict = {j for j, d in enumerate(cert.deltas) if d > 0}
        if all(
            any(profile.reports[i][j] > 0 for j in strict) for i in coalition
        ):
            assert (
                check_expected_arbitrage(QUADRATIC, profile, deviation, coalition)
                is not None
            )


class TestMeanCollusion:
    def test_replaces_members_with_their_mean(self):
        coalition = Coalition.of([0, 2])
        deviation = mean_collusion(INTRO, coalition)
        mean = Distribution.of("13/20", "7/20")
        assert deviation.reports[0] == mean
        assert deviation.reports[2] == mean
        assert deviation.reports[1] == INTRO.reports[1]

    def test_needs_two_members(self):
        with pytest.raises(ValueError):
            mean_collusion(INTRO, Coalition.of([1]))

    @given(profiles_with_coalitions())
    def test_quadratic_coalition_totals_never_drop(self, pc):
        profile, coalition = pc
        deviation = mean_collusion(profile, coalition)
        before = coalition_totals(QUADRATIC, profile, coalition)
        after = coalition_totals(QUADRATIC, deviation, coalition)
        assert all(b >= a for b, a in zip(after, before))


class TestReconstruction:
    def test_equal_split_hits_target_sums(self):
        coalition = Coalition.of([0, 1])
        target = (Fraction(3, 2), Fraction(1, 2))
        rebuilt = profile_with_coalition_sums(INTRO, coalition, target)
        for j in range(2):
            assert sum(rebuilt.reports[i][j] for i in coalition) == target[j]
        assert rebuilt.reports[2] == INTRO.reports[2]

    def test_rejects_infeasible_targets(self):
        coalition = Coalition.of([0, 1])
        with pytest.raises(ReconstructionError, match="total"):
            profile_with_coalition_sums(INTRO, coalition, (Fraction(2), Fraction(1)))
        with pytest.raises(ReconstructionError, match="outside"):
            profile_with_coalition_sums(
                INTRO, coalition, (Fraction(5, 2), Fraction(-1, 2))
            )
        with pytest.raises(ReconstructionError, match="outcomes"):
            profile_with_coalition_sums(INTRO, coalition, (Fraction(2),))


class TestSqrtExpr:
    def test_value_and_str(self):
        lower = SqrtExpr(offset=Fraction(1), coeff=Fraction(-1), radicand=Fraction(31, 150))
        upper = SqrtExpr(offset=Fraction(0), coeff=Fraction(1), radicand=Fraction(61, 150))
        assert str(lower) == "1 - sqrt(31/150)"
        assert str(upper) == "sqrt(61/150)"
        assert lower.value() == pytest.approx(0.5453939434)
        assert upper.value() == pytest.approx(0.6377042157)

    def test_exact_comparisons(self):
        root_half = SqrtExpr(offset=Fraction(0), coeff=Fraction(1), radicand=Fraction(1, 2))
        assert root_half.compare_to(Fraction(7, 10)) > 0
        assert root_half.compare_to(Fraction(71, 100)) < 0
        exact = SqrtExpr(offset=Fraction(2), coeff=Fraction(3), radicand=Fraction(4, 9))
        assert exact.compare_to(Fraction(4)) == 0

    def test_negative_coefficient_ordering(self):
        e = SqrtExpr(offset=Fraction(1), coeff=Fraction(-1), radicand=Fraction(1, 4))
        assert e.compare_to(Fraction(1, 2)) == 0
        assert e.compare_to(Fraction(0)) > 0
        assert e.compare_to(Fraction(1)) < 0

    def test_rejects_negative_radicand_and_floats(self):
        with pytest.raises(ValueError):
            SqrtExpr(offset=Fraction(0), coeff=Fraction(1), radicand=Fraction(-1))
        e = SqrtExpr(offset=Fraction(0), coeff=Fraction(1), radicand=Fraction(2))
        with pytest.raises(TypeError, match="float"):
            e.compare_to(0.5)


class TestUniformReportInterval:
    def test_intro_interval_values(self):
        interval = uniform_report_arbitrage_interval(INTRO, Coalition.full(3), 0)
        assert not interval.empty
        assert interval.lower.radicand == Fraction(31, 150)
        assert interval.upper.radicand == Fraction(61, 150)
        assert interval.contains(Fraction(546, 1000))
        assert interval.contains(Fraction(637, 1000))
        assert not interval.contains(Fraction(545, 1000))
        assert not interval.contains(Fraction(638, 1000))

    def test_membership_matches_dominance_checks(self):
        coalition = Coalition.full(3)
        interval = uniform_report_arbitrage_interval(INTRO, coalition, 0)
        for k in range(0, 21):
            x = Fraction(k, 20)
            report = Distribution(weights=(x, 1 - x))
            deviation = uniform_deviation(INTRO, coalition, report)
            cert = check_dominance(QUADRATIC, INTRO, deviation, coalition)
            assert interval.contains(x) == (cert is not None)

    def test_identical_reports_give_empty_interval(self):
        interval = uniform_report_arbitrage_interval(ALL_HALF, Coalition.full(3), 0)
        assert interval.empty
        assert not interval.contains(Fraction(1, 2))

    def test_requires_two_outcomes_and_two_members(self):
        wide = ReportProfile.of(("1/3", "1/3", "1/3"), ("1/3", "1/3", "1/3"))
        with pytest.raises(ValueError, match="2 outcomes"):
            uniform_report_arbitrage_interval(wide, Coalition.full(2), 0)
        with pytest.raises(ValueError, match="members"):
            uniform_report_arbitrage_interval(INTRO, Coalition.of([0]), 0)

    @given(profiles_with_coalitions(max_m=4, max_n=2))
    def test_radicands_stay_in_unit_range(self, pc):
        profile, coalition = pc
        for j in range(2):
            interval = uniform_report_arbitrage_interval(profile, coalition, j)
            assert 0 <= interval.lower.radicand <= 1
            assert 0 <= interval.upper.radicand <= 1


class TestSearch:
    def test_grid_finds_intro_certificate(self):
        coalition = Coalition.full(3)
        cert = search_arbitrage(
            QUADRATIC, INTRO, coalition, GridSearch(steps=10)
        )
        assert cert is not None
        assert all(d >= 0 for d in cert.deltas)
        assert any(d > 0 for d in cert.deltas)

    def test_grid_respects_arbitrage_freeness(self):
        contract = ArbitrageFreeContract(alpha=-1)
        cert = search_arbitrage(
            contract, INTRO, Coalition.full(3), GridSearch(steps=8)
        )
        assert cert is None

    def test_random_search_is_reproducible(self):
        coalition = Coalition.full(3)
        strategy = RandomSearch(trials=50, seed=11)
        first = search_arbitrage(QUADRATIC, INTRO, coalition, strategy)
        second = search_arbitrage(QUADRATIC, INTRO, coalition, strategy)
        assert (first is None) == (second is None)
        if first is not None:
            assert first.deviation == second.deviation

    def test_bounded_random_search_stays_interior(self):
        lo, hi = Fraction(1, 50), Fraction(49, 50)
        strategy = RandomSearch(trials=50, seed=3, bounds=(lo, hi))
        cert = search_arbitrage(QUADRATIC, INTRO, Coalition.full(3), strategy)
        assert cert is not None
        for i in cert.coalition:
            for w in cert.deviation.reports[i]:
                assert lo <= w <= hi

    def test_strategy_validation(self):
        with pytest.raises(ValueError):
            GridSearch(steps=1)
        with pytest.raises(ValueError):
            RandomSearch(trials=0, seed=1)

    def test_expected_kind_search(self):
        contract = ArbitrageFreeContract(alpha=16)
        cert = search_arbitrage(
            contract,
            ALL_HALF,
            Coalition.full(3),
            GridSearch(steps=4),
            kind=CertificateKind.EXPECTED,
        )
        assert cert is not None
        assert cert.kind is CertificateKind.EXPECTED
        gains = cert.member_expected_gains()
        assert all(g >= 0 for g in gains) and any(g > 0 for g in gains)
