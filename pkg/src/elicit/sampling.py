"""Seeded random generation of rational reports, profiles, and coalitions.

Everything downstream compares exact rationals, so draws are snapped to a
fixed denominator instead of staying as floats.  A point is drawn uniformly
on the simplex by normalizing exponential spacings, scaled by the
denominator, floored, and the leftover units handed to the coordinates
with the largest fractional parts (ties to the lowest index).  All
randomness flows through an explicit ``random.Random`` instance, so any
result is reproducible from one seed.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional

from .simplex import Coalition, Distribution, ReportProfile

__all__ = [
    "DEFAULT_DENOMINATOR",
    "random_distribution",
    "random_profile",
    "random_coalition",
    "derived_rng",
]

DEFAULT_DENOMINATOR = 10**4

# Rejection-sampling cutoff for bounded draws; hitting it means the bounds
# leave (almost) no room at this denominator.
_MAX_REJECTS = 100_000


def derived_rng(seed: int, label: str) -> random.Random:
    """An independent generator for one named stream of a seeded run.

    Seeding with the combined string keeps streams stable when other
    streams change their consumption pattern.
    """
    return random.Random(f"{seed}:{label}")


def _snap(weights: list[float], denominator: int) -> tuple[Fraction, ...]:
    scaled = [w * denominator for w in weights]
    base = [int(s) for s in scaled]
    leftover = denominator - sum(base)
    # leftover in [0, n): give one unit each to the largest fractional parts
    order = sorted(
        range(len(weights)), key=lambda k: (base[k] - scaled[k], k)
    )
    for k in order[:leftover]:
        base[k] += 1
    return tuple(Fraction(b, denominator) for b in base)


def random_distribution(
    rng: random.Random,
    n: int,
    denominator: int = DEFAULT_DENOMINATOR,
    bounds: Optional[tuple[Fraction, Fraction]] = None,
) -> Distribution:
    """One uniform-ish rational point of the simplex at the given resolution.

    With ``bounds = (lo, hi)`` every snapped weight is forced into
    [lo, hi] by rejection; bounds must leave the simplex reachable
    (n*lo <= 1 <= n*hi).
    """
    if n < 2:
        raise ValueError(f"need at least 2 outcomes, got n={n}")
    if denominator < 1:
        raise ValueError(f"denominator must be >= 1, got {denominator}")
    if bounds is not None:
        lo, hi = Fraction(bounds[0]), Fraction(bounds[1])
        if not 0 <= lo <= hi <= 1:
            raise ValueError(f"bad bounds [{lo}, {hi}]")
        if n * lo > 1 or n * hi < 1:
            raise ValueError(
                f"bounds [{lo}, {hi}] admit no distribution over {n} outcomes"
            )
    for _ in range(_MAX_REJECTS):
        spacings = [rng.expovariate(1.0) for _ in range(n)]
        total = sum(spacings)
        snapped = _snap([s / total for s in spacings], denominator)
        if bounds is None or all(lo <= w <= hi for w in snapped):
            return Distribution(snapped)
    raise RuntimeError(
        f"could not draw a distribution within bounds {bounds} after "
        f"{_MAX_REJECTS} attempts; widen the bounds or the denominator"
    )


def random_profile(
    rng: random.Random,
    m: int,
    n: int,
    denominator: int = DEFAULT_DENOMINATOR,
    bounds: Optional[tuple[Fraction, Fraction]] = None,
) -> ReportProfile:
    """m independent random reports over n outcomes."""
    if m < 1:
        raise ValueError(f"need at least 1 expert, got m={m}")
    return ReportProfile(
        tuple(
            random_distribution(rng, n, denominator=denominator, bounds=bounds)
            for _ in range(m)
        )
    )


def random_coalition(
    rng: random.Random, m: int, size: Optional[int] = None
) -> Coalition:
    """A uniformly drawn coalition of the given size (default: any >= 2)."""
    if m < 2:
        raise ValueError(f"need at least 2 experts, got m={m}")
    if size is None:
        size = rng.randint(2, m)
    if not 1 <= size <= m:
        raise ValueError(f"coalition size {size} out of range for m={m}")
    return Coalition(tuple(sorted(rng.sample(range(m), size))))
