"""Exact data model for probability reports on a finite outcome space.

All probabilities are exact rationals.  Nothing here normalizes or repairs
an input: a weight sequence that does not lie exactly on the simplex is
rejected, because the dominance comparisons downstream must never be
perturbed by rounding.  Floats are refused outright; callers that start
from decimal text should parse it exactly (``Fraction("0.4")`` is 2/5).

Expert and outcome indices are 0-based throughout the library.  The
command-line layer translates to and from 1-based labels for display.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator, Mapping

__all__ = [
    "Distribution",
    "ReportProfile",
    "Coalition",
    "vertex",
    "coalition_sum",
    "coalition_sums",
    "coalition_mean",
    "leave_one_out_mean",
    "simplex_lattice",
]


def _as_fraction(value) -> Fraction:
    """Coerce to Fraction, refusing floats (binary rounding is not exact)."""
    if isinstance(value, float):
        raise TypeError(
            f"refusing float {value!r}: pass a Fraction, int, or string "
            f"(e.g. '2/5' or '0.4') so the value stays exact"
        )
    return Fraction(value)


@dataclass(frozen=True)
class Distribution:
    """A point of the probability simplex with exact rational weights.

    Invariants: every weight is >= 0 and the weights sum to exactly 1.
    Construction rejects anything else; there is no silent renormalization.
    """

    weights: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not self.weights:
            raise ValueError("a distribution needs at least one outcome")
        for w in self.weights:
            if isinstance(w, float) or not isinstance(w, Rational):
                raise TypeError(f"weight {w!r} is not an exact rational")
            if w < 0:
                raise ValueError(f"negative weight {w}")
        total = sum(self.weights)
        if total != 1:
            raise ValueError(f"weights sum to {Fraction(total)}, not 1")

    @classmethod
    def of(cls, *values) -> "Distribution":
        """Build from ints, Fractions, or exact strings like '2/5' / '0.4'."""
        return cls(tuple(_as_fraction(v) for v in values))

    @property
    def n(self) -> int:
        return len(self.weights)

    def __len__(self) -> int:
        return len(self.weights)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.weights)

    def __getitem__(self, j: int) -> Fraction:
        return self.weights[j]


def vertex(n: int, j: int) -> Distribution:
    """The distribution putting all mass on outcome j."""
    if n < 2:
        raise ValueError(f"need at least 2 outcomes, got n={n}")
    if not 0 <= j < n:
        raise IndexError(f"outcome {j} out of range for n={n}")
    return Distribution(tuple(Fraction(1 if k == j else 0) for k in range(n)))


@dataclass(frozen=True)
class ReportProfile:
    """An ordered tuple of expert reports sharing one outcome space."""

    reports: tuple[Distribution, ...]

    def __post_init__(self) -> None:
        if not self.reports:
            raise ValueError("a profile needs at least one expert")
        n = self.reports[0].n
        if n < 2:
            raise ValueError(f"need at least 2 outcomes, got n={n}")
        for i, r in enumerate(self.reports):
            if not isinstance(r, Distribution):
                raise TypeError(f"report {i} is not a Distribution")
            if r.n != n:
                raise ValueError(
                    f"report {i} has {r.n} outcomes, expected {n}"
                )

    @classmethod
    def of(cls, *rows) -> "ReportProfile":
        """Build from Distributions or per-expert weight iterables."""
        dists = tuple(
            row if isinstance(row, Distribution) else Distribution.of(*row)
            for row in rows
        )
        return cls(dists)

    @property
    def m(self) -> int:
        return len(self.reports)

    @property
    def n(self) -> int:
        return self.reports[0].n

    def totals(self) -> tuple[Fraction, ...]:
        """Coordinatewise sum of all reports (the all-experts column sums)."""
        return tuple(
            sum(r.weights[j] for r in self.reports) for j in range(self.n)
        )

    def replace(self, changes: Mapping[int, Distribution]) -> "ReportProfile":
        """A copy with the given experts' reports swapped out."""
        for i, d in changes.items():
            if not 0 <= i < self.m:
                raise IndexError(f"expert {i} out of range for m={self.m}")
            if d.n != self.n:
                raise ValueError(
                    f"replacement for expert {i} has {d.n} outcomes, "
                    f"expected {self.n}"
                )
        return ReportProfile(
            tuple(
                changes.get(i, r) for i, r in enumerate(self.reports)
            )
        )


@dataclass(frozen=True)
class Coalition:
    """A nonempty, sorted, duplicate-free set of expert indices."""

    members: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("a coalition must be nonempty")
        prev = -1
        for i in self.members:
            if not isinstance(i, int) or i < 0:
                raise ValueError(f"bad expert index {i!r}")
            if i <= prev:
                raise ValueError(
                    f"members must be strictly increasing, got {self.members}"
                )
            prev = i

    @classmethod
    def of(cls, indices: Iterable[int]) -> "Coalition":
        """Build from any iterable of indices; sorts and deduplicates."""
        return cls(tuple(sorted(set(indices))))

    @classmethod
    def full(cls, m: int) -> "Coalition":
        """The grand coalition of all m experts."""
        return cls(tuple(range(m)))

    @property
    def size(self) -> int:
        return len(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, i: int) -> bool:
        return i in self.members

    def validate_for(self, m: int) -> None:
        if self.members[-1] >= m:
            raise ValueError(
                f"coalition {self.members} includes an expert >= m={m}"
            )

    def complement(self, m: int) -> tuple[int, ...]:
        """Indices outside the coalition (may be empty)."""
        self.validate_for(m)
        inside = set(self.members)
        return tuple(i for i in range(m) if i not in inside)


def _check_outcome(profile: ReportProfile, j: int) -> None:
    if not 0 <= j < profile.n:
        raise IndexError(f"outcome {j} out of range for n={profile.n}")


def coalition_sum(profile: ReportProfile, coalition: Coalition, j: int) -> Fraction:
    """Total probability the coalition assigns to outcome j.

    Lies in [0, |coalition|]; this single number per outcome is the only
    degree of freedom a coalition has under the arbitrage-free contract.
    """
    coalition.validate_for(profile.m)
    _check_outcome(profile, j)
    return sum(profile.reports[i].weights[j] for i in coalition)


def coalition_sums(profile: ReportProfile, coalition: Coalition) -> tuple[Fraction, ...]:
    """Per-outcome coalition sums, as one tuple of length n."""
    coalition.validate_for(profile.m)
    return tuple(
        sum(profile.reports[i].weights[j] for i in coalition)
        for j in range(profile.n)
    )


def coalition_mean(profile: ReportProfile, coalition: Coalition) -> Distribution:
    """Coordinatewise average of the coalition's reports.

    The simplex is closed under averaging, so the result is always a
    valid Distribution.
    """
    coalition.validate_for(profile.m)
    k = coalition.size
    return Distribution(
        tuple(
            sum(profile.reports[i].weights[j] for i in coalition) / k
            for j in range(profile.n)
        )
    )


def leave_one_out_mean(profile: ReportProfile, i: int) -> Distribution:
    """Average report of everyone except expert i (requires m >= 2)."""
    if profile.m < 2:
        raise ValueError("leave-one-out mean needs at least 2 experts")
    if not 0 <= i < profile.m:
        raise IndexError(f"expert {i} out of range for m={profile.m}")
    totals = profile.totals()
    w = profile.reports[i].weights
    k = profile.m - 1
    return Distribution(tuple((totals[j] - w[j]) / k for j in range(profile.n)))


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def simplex_lattice(n: int, steps: int) -> Iterator[Distribution]:
    """All distributions with denominator `steps`, in lexicographic order.

    Enumerates every (k_1/g, ..., k_n/g) with nonnegative integers summing
    to g = steps.  The count is C(g + n - 1, n - 1); keep g modest for
    n > 3.
    """
    if n < 2:
        raise ValueError(f"need at least 2 outcomes, got n={n}")
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    for ks in _compositions(steps, n):
        yield Distribution(tuple(Fraction(k, steps) for k in ks))
