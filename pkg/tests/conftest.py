"""Shared strategies and fixtures for the test suite.

All strategies emit exact rationals only; probability weights are built
as integer counts over a common denominator so every drawn object sits
exactly on the simplex.
"""

from __future__ import annotations

from fractions import Fraction

from hypothesis import settings, strategies as st

from elicit import Coalition, Distribution, ReportProfile

settings.register_profile("suite", deadline=None, max_examples=50)
settings.load_profile("suite")


@st.composite
def distributions(draw, n: int | None = None, max_n: int = 4, resolution: int = 12):
    """An exact rational distribution; weights are multiples of 1/total."""
    if n is None:
        n = draw(st.integers(2, max_n))
    counts = draw(
        st.lists(st.integers(0, resolution), min_size=n, max_size=n).filter(
            lambda c: sum(c) > 0
        )
    )
    total = sum(counts)
    return Distribution.of(*(Fraction(c, total) for c in counts))


@st.composite
def profiles(draw, m: int | None = None, n: int | None = None, max_m: int = 4, max_n: int = 3):
    if m is None:
        m = draw(st.integers(2, max_m))
    if n is None:
        n = draw(st.integers(2, max_n))
    return ReportProfile.of(*(draw(distributions(n=n)) for _ in range(m)))


@st.composite
def profiles_with_coalitions(draw, max_m: int = 4, max_n: int = 3):
    profile = draw(profiles(max_m=max_m, max_n=max_n))
    size = draw(st.integers(2, profile.m))
    members = draw(st.permutations(range(profile.m)))[:size]
    return profile, Coalition.of(members)


@st.composite
def outcome_indices(draw, n: int):
    return draw(st.integers(0, n - 1))
