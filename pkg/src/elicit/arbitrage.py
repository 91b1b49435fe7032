"""Detection, construction, and search of coalition arbitrage.

A coalition holds an arbitrage opportunity when changing only its own
members' reports weakly raises the coalition's total payment under every
outcome and strictly raises it under at least one: a riskless joint gain.
The expected variant weighs the per-outcome gains by each member's own
belief (taken to be their baseline report) and asks that every member
expect a weak gain, some member a strict one.

Checks on exact contracts compare Fractions and certify exactly; on
float-valued contracts (the log rule) they use a fixed tolerance and the
resulting certificates are flagged as numeric.  Searches are plain
enumeration or seeded random sampling; both are deterministic, and any
certificate they return re-verifies under the corresponding check.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator, Optional, Sequence

from .contracts import ArbitrageFreeContract, ContractFunction, coalition_totals
from .sampling import random_distribution
from .scoring import quadratic_score
from .simplex import (
    Coalition,
    Distribution,
    ReportProfile,
    _as_fraction,
    simplex_lattice,
)

__all__ = [
    "NUMERIC_TOLERANCE",
    "DeviationMismatchError",
    "ReconstructionError",
    "CertificateKind",
    "ensure_agreement_outside",
    "ArbitrageCertificate",
    "check_dominance",
    "check_expected_arbitrage",
    "mean_collusion",
    "profile_with_coalition_sums",
    "SqrtExpr",
    "ArbitrageInterval",
    "uniform_report_arbitrage_interval",
    "GridSearch",
    "RandomSearch",
    "search_arbitrage",
]

# Slack for dominance comparisons on float-valued contracts.  Exact
# contracts never use it.
NUMERIC_TOLERANCE = 1e-9


class DeviationMismatchError(ValueError):
    """Baseline and deviation disagree on an expert outside the coalition.

    That is a misuse of the comparison, not a negative result, so it is
    an error rather than a None.
    """


class ReconstructionError(ValueError):
    """A target coalition-sum vector admits no valid member reports."""


class CertificateKind(enum.Enum):
    DOMINANCE = "dominance"
    EXPECTED = "expected"


def ensure_agreement_outside(
    baseline: ReportProfile, deviation: ReportProfile, coalition: Coalition
) -> None:
    """Raise DeviationMismatchError unless only coalition reports changed."""
    if deviation.m != baseline.m or deviation.n != baseline.n:
        raise DeviationMismatchError(
            f"deviation shape ({deviation.m} experts, {deviation.n} "
            f"outcomes) does not match baseline ({baseline.m}, {baseline.n})"
        )
    coalition.validate_for(baseline.m)
    for i in coalition.complement(baseline.m):
        if baseline.reports[i] != deviation.reports[i]:
            raise DeviationMismatchError(
                f"expert {i + 1} (1-based) is outside the coalition but "
                f"reports differ between baseline and deviation"
            )


def _weakly_positive(values: Sequence, exact: bool) -> bool:
    if exact:
        return all(v >= 0 for v in values)
    return all(v >= -NUMERIC_TOLERANCE for v in values)


def _somewhere_positive(values: Sequence, exact: bool) -> bool:
    if exact:
        return any(v > 0 for v in values)
    return any(v > NUMERIC_TOLERANCE for v in values)


@dataclass(frozen=True)
class ArbitrageCertificate:
    """A verified witness that a coalition deviation is a riskless gain.

    ``deltas`` holds the per-outcome change in the coalition's total
    payment (deviation minus baseline).  ``exact`` marks whether the
    comparisons behind the certificate were exact rational arithmetic or
    float comparisons at NUMERIC_TOLERANCE.  Construction re-validates
    the defining inequalities, so an instance that exists is sound.
    """

    baseline: ReportProfile
    deviation: ReportProfile
    coalition: Coalition
    deltas: tuple
    kind: CertificateKind
    exact: bool = True

    def __post_init__(self) -> None:
        ensure_agreement_outside(self.baseline, self.deviation, self.coalition)
        if len(self.deltas) != self.baseline.n:
            raise ValueError(
                f"{len(self.deltas)} deltas for {self.baseline.n} outcomes"
            )
        if self.kind is CertificateKind.DOMINANCE:
            ok = _weakly_positive(self.deltas, self.exact) and (
                _somewhere_positive(self.deltas, self.exact)
            )
            if not ok:
                raise ValueError(
                    f"deltas {self.deltas} do not witness dominance"
                )
        else:
            gains = self.member_expected_gains()
            ok = _weakly_positive(gains, self.exact) and (
                _somewhere_positive(gains, self.exact)
            )
            if not ok:
                raise ValueError(
                    f"member expected gains {gains} do not witness "
                    f"expected arbitrage"
                )

    def member_expected_gains(self) -> tuple:
        """Belief-weighted delta per coalition member, in member order.

        Each member's belief is their own baseline report.
        """
        gains = []
        for i in self.coalition:
            belief = self.baseline.reports[i].weights
            gains.append(
                sum(belief[j] * d for j, d in enumerate(self.deltas))
            )
        return tuple(gains)


def check_dominance(
    contract: ContractFunction,
    baseline: ReportProfile,
    deviation: ReportProfile,
    coalition: Coalition,
) -> Optional[ArbitrageCertificate]:
    """Certificate if the deviation dominates the baseline for the coalition.

    Dominance: the coalition's total payment weakly rises under every
    outcome and strictly rises under at least one.  Returns None when it
    does not; raises DeviationMismatchError when the profiles disagree
    outside the coalition.
    """
    ensure_agreement_outside(baseline, deviation, coalition)
    before = coalition_totals(contract, baseline, coalition)
    after = coalition_totals(contract, deviation, coalition)
    deltas = tuple(a - b for a, b in zip(after, before))
    exact = contract.exact
    # NaN deltas (both totals -inf under the log rule) fail the weak test
    # and correctly yield no certificate.
    if _weakly_positive(deltas, exact) and _somewhere_positive(deltas, exact):
        return ArbitrageCertificate(
            baseline=baseline,
            deviation=deviation,
            coalition=coalition,
            deltas=deltas,
            kind=CertificateKind.DOMINANCE,
            exact=exact,
        )
    return None


def check_expected_arbitrage(
    contract: ContractFunction,
    baseline: ReportProfile,
    deviation: ReportProfile,
    coalition: Coalition,
) -> Optional[ArbitrageCertificate]:
    """Certificate if every member expects the coalition total to rise.

    Member i's expectation weighs the per-outcome coalition deltas by
    their baseline report; all members must weakly gain and at least one
    strictly.
    """
    ensure_agreement_outside(baseline, deviation, coalition)
    before = coalition_totals(contract, baseline, coalition)
    after = coalition_totals(contract, deviation, coalition)
    deltas = tuple(a - b for a, b in zip(after, before))
    exact = contract.exact
    gains = []
    for i in coalition:
        belief = baseline.reports[i].weights
        gains.append(sum(belief[j] * d for j, d in enumerate(deltas)))
    if _weakly_positive(gains, exact) and _somewhere_positive(gains, exact):
        return ArbitrageCertificate(
            baseline=baseline,
            deviation=deviation,
            coalition=coalition,
            deltas=deltas,
            kind=CertificateKind.EXPECTED,
            exact=exact,
        )
    return None


def mean_collusion(profile: ReportProfile, coalition: Coalition) -> ReportProfile:
    """The deviation where every coalition member reports the coalition mean.

    Under independent quadratic scoring this is the coalition's riskless
    aggregate move; everyone outside the coalition is untouched.
    """
    if coalition.size < 2:
        raise ValueError(
            f"collusion needs at least 2 members, got {coalition.size}"
        )
    coalition.validate_for(profile.m)
    mean = Distribution(
        tuple(
            sum(profile.reports[i].weights[j] for i in coalition)
            / coalition.size
            for j in range(profile.n)
        )
    )
    return profile.replace({i: mean for i in coalition})


def profile_with_coalition_sums(
    profile: ReportProfile,
    coalition: Coalition,
    sums: Sequence[Fraction],
) -> ReportProfile:
    """Deviation hitting the target per-outcome coalition sums, equal split.

    Every member reports sums/|coalition|.  The target must be a valid
    sum vector (each entry in [0, |coalition|], total |coalition|);
    anything else raises ReconstructionError instead of being adjusted.
    """
    coalition.validate_for(profile.m)
    k = coalition.size
    if len(sums) != profile.n:
        raise ReconstructionError(
            f"{len(sums)} target sums for {profile.n} outcomes"
        )
    sums = tuple(_as_fraction(s) for s in sums)
    if sum(sums) != k:
        raise ReconstructionError(
            f"target sums total {sum(sums)}, need exactly {k}"
        )
    for j, s in enumerate(sums):
        if not 0 <= s <= k:
            raise ReconstructionError(
                f"target sum {s} for outcome {j} outside [0, {k}]"
            )
    share = Distribution(tuple(s / k for s in sums))
    return profile.replace({i: share for i in coalition})


def _sqrt_sum_vs_one(a: Fraction, b: Fraction) -> int:
    """Sign of sqrt(a) + sqrt(b) - 1 for nonnegative rationals, exactly.

    Square twice: sqrt(a) + sqrt(b) ? 1 reduces to 2*sqrt(a*b) ? 1 - a - b,
    and when the right side is nonnegative, to 4ab ? (1 - a - b)**2.
    """
    if a < 0 or b < 0:
        raise ValueError("radicands must be nonnegative")
    rhs = 1 - a - b
    if rhs < 0:
        return 1
    lhs = 4 * a * b
    rhs2 = rhs * rhs
    if lhs > rhs2:
        return 1
    if lhs == rhs2:
        return 0
    return -1


@dataclass(frozen=True)
class SqrtExpr:
    """Exact algebraic value offset + coeff * sqrt(radicand).

    Stores interval endpoints like 1 - sqrt(31/150) without rounding;
    ``compare_to`` orders the value against any rational exactly, and
    ``value`` gives a float for display.
    """

    offset: Fraction
    coeff: Fraction
    radicand: Fraction

    def __post_init__(self) -> None:
        if self.radicand < 0:
            raise ValueError(f"negative radicand {self.radicand}")

    def value(self) -> float:
        return float(self.offset) + float(self.coeff) * float(self.radicand) ** 0.5

    def compare_to(self, other) -> int:
        """Sign of (self - other) for rational other, computed exactly."""
        t = _as_fraction(other) - self.offset
        if self.coeff == 0 or self.radicand == 0:
            rest = Fraction(0)
            return (rest > t) - (rest < t)
        # coeff * sqrt(radicand) ? t
        if self.coeff > 0:
            if t < 0:
                return 1
            lhs = self.coeff**2 * self.radicand
            t2 = t * t
            return (lhs > t2) - (lhs < t2)
        if t > 0:
            return -1
        lhs = self.coeff**2 * self.radicand
        t2 = t * t
        # more negative coeff*sqrt means smaller value
        return (t2 > lhs) - (t2 < lhs)

    def __str__(self) -> str:
        if self.coeff == 0 or self.radicand == 0:
            return str(self.offset)
        root = f"sqrt({self.radicand})"
        if self.offset == 0:
            lead = ""
        else:
            lead = f"{self.offset} "
        if self.coeff == 1:
            return f"{lead}+ {root}" if lead else root
        if self.coeff == -1:
            return f"{lead}- {root}" if lead else f"-{root}"
        sign = "+" if self.coeff > 0 else "-"
        mag = abs(self.coeff)
        if lead:
            return f"{lead}{sign} {mag}*{root}"
        return f"{'-' if sign == '-' else ''}{mag}*{root}"


@dataclass(frozen=True)
class ArbitrageInterval:
    """Closed interval of uniform coalition reports that dominate baseline.

    ``outcome`` names which outcome's probability the interval describes.
    Empty means no uniform report gives a strict gain anywhere (including
    the degenerate single-point case, where the deviation merely matches
    the baseline totals).
    """

    outcome: int
    lower: SqrtExpr
    upper: SqrtExpr
    empty: bool

    def contains(self, x) -> bool:
        """Exact membership test for a rational probability x."""
        if self.empty:
            return False
        x = _as_fraction(x)
        return self.lower.compare_to(x) <= 0 <= self.upper.compare_to(x)


def uniform_report_arbitrage_interval(
    profile: ReportProfile, coalition: Coalition, j: int
) -> ArbitrageInterval:
    """All x where the coalition jointly reporting (x on j) dominates.

    Two outcomes, independent quadratic scoring.  With T_j the baseline
    coalition score total under outcome j and c = |coalition|, the weak
    constraints solve to

        x >= 1 - sqrt((c - T_j) / 2c)    and
        x <= sqrt((c - T_other) / 2c),

    both radicands lying in [0, 1] because per-expert scores lie in
    [-1, 1].  The interval is empty when lower >= upper: at lower == upper
    both constraints are tight, so no outcome strictly improves.
    """
    if profile.n != 2:
        raise ValueError(
            f"uniform-report intervals need exactly 2 outcomes, "
            f"got n={profile.n}"
        )
    if coalition.size < 2:
        raise ValueError(
            f"need at least 2 coalition members, got {coalition.size}"
        )
    coalition.validate_for(profile.m)
    if not 0 <= j < 2:
        raise IndexError(f"outcome {j} out of range for n=2")
    c = coalition.size
    totals = [
        sum(quadratic_score(profile.reports[i], ell) for i in coalition)
        for ell in range(2)
    ]
    rad_lower = Fraction(c - totals[j], 2 * c)
    rad_upper = Fraction(c - totals[1 - j], 2 * c)
    lower = SqrtExpr(offset=Fraction(1), coeff=Fraction(-1), radicand=rad_lower)
    upper = SqrtExpr(offset=Fraction(0), coeff=Fraction(1), radicand=rad_upper)
    # lower < upper  iff  sqrt(rad_lower) + sqrt(rad_upper) > 1
    empty = _sqrt_sum_vs_one(rad_lower, rad_upper) <= 0
    return ArbitrageInterval(outcome=j, lower=lower, upper=upper, empty=empty)


@dataclass(frozen=True)
class GridSearch:
    """Exhaustive enumeration at lattice spacing 1/steps, in lex order."""

    steps: int

    def __post_init__(self) -> None:
        if self.steps < 2:
            raise ValueError(f"grid needs steps >= 2, got {self.steps}")


@dataclass(frozen=True)
class RandomSearch:
    """Seeded random deviations; reproducible given (trials, seed).

    ``denominator`` controls the rational resolution of drawn reports;
    ``bounds``, when set, restricts every drawn weight to [lo, hi].
    """

    trials: int
    seed: int
    denominator: int = 10**4
    bounds: Optional[tuple[Fraction, Fraction]] = None

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"need trials >= 1, got {self.trials}")


def _grid_deviations(
    contract: ContractFunction,
    baseline: ReportProfile,
    coalition: Coalition,
    steps: int,
) -> Iterator[ReportProfile]:
    members = tuple(coalition)
    if isinstance(contract, ArbitrageFreeContract):
        # The coalition's totals depend only on its per-outcome sums, so
        # enumerate sum vectors (one lattice point, scaled by |C|) and
        # realize each by the equal split where every member reports the
        # lattice point itself.
        for point in simplex_lattice(baseline.n, steps):
            yield baseline.replace({i: point for i in members})
    else:
        lattice = list(simplex_lattice(baseline.n, steps))
        for combo in product(lattice, repeat=len(members)):
            yield baseline.replace(dict(zip(members, combo)))


def _random_deviations(
    baseline: ReportProfile,
    coalition: Coalition,
    strategy: RandomSearch,
) -> Iterator[ReportProfile]:
    rng = random.Random(strategy.seed)
    members = tuple(coalition)
    for _ in range(strategy.trials):
        changes = {
            i: random_distribution(
                rng,
                baseline.n,
                denominator=strategy.denominator,
                bounds=strategy.bounds,
            )
            for i in members
        }
        yield baseline.replace(changes)


def search_arbitrage(
    contract: ContractFunction,
    baseline: ReportProfile,
    coalition: Coalition,
    strategy,
    kind: CertificateKind = CertificateKind.DOMINANCE,
) -> Optional[ArbitrageCertificate]:
    """First certificate over the strategy's deviations, or None.

    Grid enumeration runs in lexicographic order, so when several grid
    deviations certify, the lexicographically smallest one is returned;
    that makes results reproducible byte for byte.  Random search is
    reproducible via its seed.
    """
    coalition.validate_for(baseline.m)
    if isinstance(strategy, GridSearch):
        deviations = _grid_deviations(
            contract, baseline, coalition, strategy.steps
        )
    elif isinstance(strategy, RandomSearch):
        deviations = _random_deviations(baseline, coalition, strategy)
    else:
        raise TypeError(f"unknown search strategy {strategy!r}")
    check = (
        check_dominance
        if kind is CertificateKind.DOMINANCE
        else check_expected_arbitrage
    )
    for deviation in deviations:
        cert = check(contract, baseline, deviation, coalition)
        if cert is not None:
            return cert
    return None
