"""Multi-expert contract functions and the arbitrage-free family.

A contract function maps a full report profile and a realized outcome to a
vector of per-expert payments.  Paying each expert an independent strictly
proper score is truthful but lets coalitions profit risklessly by moving
reports in opposite directions.  The family implemented by
``ArbitrageFreeContract`` removes that: expert i earns their own quadratic
score, minus a scaled quadratic score of the other experts' mean report,
plus a linear bonus ``alpha`` times the mean probability the others put on
the realized outcome.

The linear coefficient decides everything.  With m experts on n outcomes
the family is arbitrage-free exactly when ``alpha < 0`` or
``alpha >= 2 * (m - 1)**2 * n``; anything in between admits coalitions
with a riskless joint gain.  ``validate_alpha`` classifies a coefficient,
and evaluation refuses invalid ones unless explicitly told to proceed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .scoring import ScoringRule, quadratic_score
from .simplex import (
    Coalition,
    Distribution,
    ReportProfile,
    _as_fraction,
    leave_one_out_mean,
)

__all__ = [
    "AlphaRangeError",
    "AlphaVerdict",
    "AlphaCheck",
    "validate_alpha",
    "threshold_two_outcome",
    "threshold_general",
    "ContractFunction",
    "IndependentScoring",
    "ZeroSumPair",
    "ArbitrageFreeContract",
    "InducedExpertRule",
    "coalition_total",
    "coalition_totals",
    "expert_reward",
    "expected_reward",
]


class AlphaRangeError(ValueError):
    """Raised when a linear coefficient sits in the arbitrage-prone band."""


class AlphaVerdict(enum.Enum):
    """Where a linear coefficient falls relative to the safe bands."""

    VALID_NEGATIVE = "valid-negative"
    VALID_LARGE = "valid-large"
    INVALID = "invalid"


def threshold_two_outcome(m: int, alpha: Fraction) -> Fraction:
    """Equivalent threshold form of alpha for two-outcome analysis.

    Defined as (m - 1) - alpha / (4 * (m - 1)).  The two safe bands map to
    threshold > m - 1 (negative alpha) and threshold <= 0 (large alpha,
    n = 2); the arbitrage-prone band is 0 < threshold <= m - 1.
    """
    if m < 2:
        raise ValueError(f"need at least 2 experts, got m={m}")
    return (m - 1) - Fraction(alpha) / (4 * (m - 1))


def threshold_general(m: int, alpha: Fraction) -> Fraction:
    """Threshold form used for general outcome counts.

    Defined as (m - 1) - alpha / (2 * (m - 1)); negative alpha is exactly
    threshold > m - 1.
    """
    if m < 2:
        raise ValueError(f"need at least 2 experts, got m={m}")
    return (m - 1) - Fraction(alpha) / (2 * (m - 1))


@dataclass(frozen=True)
class AlphaCheck:
    """Classification of a linear coefficient for given m experts, n outcomes."""

    alpha: Fraction
    m: int
    n: int
    verdict: AlphaVerdict
    lower_safe_bound: Fraction
    two_outcome_threshold: Fraction
    general_threshold: Fraction

    @property
    def valid(self) -> bool:
        return self.verdict is not AlphaVerdict.INVALID


def validate_alpha(alpha, m: int, n: int) -> AlphaCheck:
    """Classify alpha as valid-negative, valid-large, or invalid.

    The large-side cutoff 2 * (m - 1)**2 * n is itself valid (the bound
    is inclusive).  alpha = 0 is invalid: it admits arbitrage whenever all
    but two experts rule out some outcome.
    """
    if m < 2:
        raise ValueError(f"need at least 2 experts, got m={m}")
    if n < 2:
        raise ValueError(f"need at least 2 outcomes, got n={n}")
    a = _as_fraction(alpha)
    cutoff = Fraction(2 * (m - 1) ** 2 * n)
    if a < 0:
        verdict = AlphaVerdict.VALID_NEGATIVE
    elif a >= cutoff:
        verdict = AlphaVerdict.VALID_LARGE
    else:
        verdict = AlphaVerdict.INVALID
    return AlphaCheck(
        alpha=a,
        m=m,
        n=n,
        verdict=verdict,
        lower_safe_bound=cutoff,
        two_outcome_threshold=threshold_two_outcome(m, a),
        general_threshold=threshold_general(m, a),
    )


class ContractFunction:
    """Interface: evaluate(profile, outcome) -> per-expert payment tuple."""

    exact: bool = True

    def evaluate(self, profile: ReportProfile, j: int) -> tuple:
        raise NotImplementedError

    def expert_view(self, profile: ReportProfile, i: int) -> ScoringRule:
        """The scoring rule expert i effectively faces, others held fixed.

        Only defined for contracts where the payment decomposes as a
        function of the expert's own report plus terms constant in it.
        """
        raise NotImplementedError


def _check_eval_args(profile: ReportProfile, j: int) -> None:
    if not 0 <= j < profile.n:
        raise IndexError(f"outcome {j} out of range for n={profile.n}")


@dataclass(frozen=True)
class IndependentScoring(ContractFunction):
    """Each expert is paid their own score; no cross-expert terms.

    Truthful but not arbitrage-free for any strictly proper rule.
    """

    rule: ScoringRule

    @property
    def exact(self) -> bool:  # type: ignore[override]
        return self.rule.exact

    def evaluate(self, profile: ReportProfile, j: int) -> tuple:
        _check_eval_args(profile, j)
        return tuple(self.rule.score(r, j) for r in profile.reports)

    def expert_view(self, profile: ReportProfile, i: int) -> ScoringRule:
        if not 0 <= i < profile.m:
            raise IndexError(f"expert {i} out of range for m={profile.m}")
        return self.rule


@dataclass(frozen=True)
class InducedExpertRule(ScoringRule):
    """Quadratic score plus outcome-dependent offsets fixed by the others.

    Strictly proper for any offsets: adding a constant per outcome never
    changes which report maximizes expected score.
    """

    offsets: tuple[Fraction, ...]
    exact: bool = True

    def score(self, report: Distribution, j: int) -> Fraction:
        if report.n != len(self.offsets):
            raise ValueError(
                f"report has {report.n} outcomes, offsets cover "
                f"{len(self.offsets)}"
            )
        return quadratic_score(report, j) + self.offsets[j]


@dataclass(frozen=True)
class ZeroSumPair(ContractFunction):
    """Two-expert zero-sum contract: each paid own minus the other's score.

    Uses the quadratic rule.  Budget-balanced by construction, truthful,
    and arbitrage-free: any joint deviation just shuffles payment between
    the two members, so the pair's total is identically zero.
    """

    exact: bool = True

    def evaluate(self, profile: ReportProfile, j: int) -> tuple:
        _check_eval_args(profile, j)
        if profile.m != 2:
            raise ValueError(
                f"zero-sum pair contract needs exactly 2 experts, "
                f"got m={profile.m}"
            )
        a = quadratic_score(profile.reports[0], j)
        b = quadratic_score(profile.reports[1], j)
        return (a - b, b - a)

    def expert_view(self, profile: ReportProfile, i: int) -> ScoringRule:
        if profile.m != 2:
            raise ValueError(
                f"zero-sum pair contract needs exactly 2 experts, "
                f"got m={profile.m}"
            )
        if not 0 <= i < 2:
            raise IndexError(f"expert {i} out of range for m=2")
        other = profile.reports[1 - i]
        offsets = tuple(
            -quadratic_score(other, j) for j in range(profile.n)
        )
        return InducedExpertRule(offsets=offsets)


@dataclass(frozen=True)
class ArbitrageFreeContract(ContractFunction):
    """The linear-coefficient family of truthful arbitrage-free contracts.

    Expert i's payment on outcome j is

        own quadratic score at j
        - (m - 1)**2 * quadratic score of the others' mean report at j
        + alpha * mean probability the others assigned to j.

    Needs m >= 2.  Evaluation raises AlphaRangeError when alpha lies in
    the arbitrage-prone band for the profile's shape, unless
    ``permissive`` is set (useful for demonstrating the failure modes).
    """

    alpha: Fraction
    permissive: bool = False
    exact: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", _as_fraction(self.alpha))

    def check(self, m: int, n: int) -> AlphaCheck:
        return validate_alpha(self.alpha, m, n)

    def _require_valid(self, profile: ReportProfile) -> None:
        if self.permissive:
            return
        check = validate_alpha(self.alpha, profile.m, profile.n)
        if not check.valid:
            raise AlphaRangeError(
                f"alpha={self.alpha} lies in the arbitrage-prone band "
                f"[0, {check.lower_safe_bound}) for m={profile.m}, "
                f"n={profile.n}; enable permissive mode to evaluate anyway"
            )

    def evaluate(self, profile: ReportProfile, j: int) -> tuple:
        _check_eval_args(profile, j)
        if profile.m < 2:
            raise ValueError(
                f"need at least 2 experts, got m={profile.m}"
            )
        self._require_valid(profile)
        m, n = profile.m, profile.n
        k = m - 1
        totals = profile.totals()
        rewards = []
        for i in range(m):
            w = profile.reports[i].weights
            loo = [(totals[l] - w[l]) / k for l in range(n)]
            own = 2 * w[j] - sum(p * p for p in w)
            mean_sc = 2 * loo[j] - sum(p * p for p in loo)
            rewards.append(own - k * k * mean_sc + self.alpha * loo[j])
        return tuple(rewards)

    def expert_view(self, profile: ReportProfile, i: int) -> InducedExpertRule:
        if profile.m < 2:
            raise ValueError(
                f"need at least 2 experts, got m={profile.m}"
            )
        if not 0 <= i < profile.m:
            raise IndexError(f"expert {i} out of range for m={profile.m}")
        self._require_valid(profile)
        k = profile.m - 1
        loo = leave_one_out_mean(profile, i)
        offsets = tuple(
            -(k * k) * quadratic_score(loo, j) + self.alpha * loo.weights[j]
            for j in range(profile.n)
        )
        return InducedExpertRule(offsets=offsets)


def coalition_total(
    contract: ContractFunction,
    profile: ReportProfile,
    coalition: Coalition,
    j: int,
):
    """The coalition's combined payment on outcome j."""
    coalition.validate_for(profile.m)
    rewards = contract.evaluate(profile, j)
    return sum(rewards[i] for i in coalition)


def coalition_totals(
    contract: ContractFunction,
    profile: ReportProfile,
    coalition: Coalition,
) -> tuple:
    """Combined coalition payment for every outcome, as a length-n tuple."""
    coalition.validate_for(profile.m)
    out = []
    for j in range(profile.n):
        rewards = contract.evaluate(profile, j)
        out.append(sum(rewards[i] for i in coalition))
    return tuple(out)


def expert_reward(
    contract: ContractFunction, profile: ReportProfile, i: int, j: int
):
    """Expert i's payment on outcome j."""
    if not 0 <= i < profile.m:
        raise IndexError(f"expert {i} out of range for m={profile.m}")
    return contract.evaluate(profile, j)[i]


def expected_reward(
    contract: ContractFunction,
    profile: ReportProfile,
    i: int,
    belief: Distribution,
):
    """Expert i's belief-weighted expected payment under the contract.

    Skips zero-belief outcomes, so a -inf payment on an outcome the belief
    rules out contributes nothing.
    """
    if not 0 <= i < profile.m:
        raise IndexError(f"expert {i} out of range for m={profile.m}")
    if belief.n != profile.n:
        raise ValueError(
            f"belief has {belief.n} outcomes, profile has {profile.n}"
        )
    total = Fraction(0) if contract.exact else 0.0
    for j, q in enumerate(belief.weights):
        if q == 0:
            continue
        r = contract.evaluate(profile, j)[i]
        if not contract.exact and r == float("-inf"):
            return float("-inf")
        total += q * r
    return total
