"""Decision rules and sample-size planning for frequency-based verification.

Verification reduces to one question: is an observed error count over the
marked positions consistent with the expected flip rate? Three answers are
offered with different rigor: a fixed tolerance band around the observed
frequency, a Wilson score interval, and a two-sided exact binomial test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

from .errors import (
    CountExceedsTotal,
    InvalidProbability,
    RatesEqual,
    Unachievable,
    ZeroTotal,
)

__all__ = [
    "ACCEPT",
    "REJECT",
    "FIXED_TOLERANCE",
    "WILSON_INTERVAL",
    "EXACT_BINOMIAL",
    "MAX_SAMPLE_SIZE",
    "DecisionRule",
    "DecisionOutcome",
    "SampleSizeSpec",
    "relative_frequency",
    "decide",
    "min_sample_size_literal",
    "recommended_sample_size",
]

ACCEPT = "accept"
REJECT = "reject"

FIXED_TOLERANCE = "fixed_tolerance"
WILSON_INTERVAL = "wilson_interval"
EXACT_BINOMIAL = "exact_binomial"

MAX_SAMPLE_SIZE = 100_000

# Relative slack when comparing probability masses in the two-sided exact
# test; absorbs log-space roundoff without affecting clear-cut outcomes.
_PMF_TIE_SLACK = 1e-12


@dataclass(frozen=True)
class DecisionRule:
    """How to turn (errors, total, expected rate) into accept or reject.

    kind selects the test; fixed_tolerance carries a tolerance, the two
    statistical rules carry a confidence level.
    """

    kind: str
    tolerance: float | None = None
    confidence: float | None = None

    def __post_init__(self) -> None:
        if self.kind == FIXED_TOLERANCE:
            if self.confidence is not None:
                raise ValueError("fixed tolerance rule takes no confidence")
            if self.tolerance is None or not 0.0 < self.tolerance < 1.0:
                raise ValueError(f"tolerance must be in (0, 1), got {self.tolerance!r}")
        elif self.kind in (WILSON_INTERVAL, EXACT_BINOMIAL):
            if self.tolerance is not None:
                raise ValueError(f"{self.kind} rule takes no tolerance")
            if self.confidence is None or not 0.0 < self.confidence < 1.0:
                raise ValueError(f"confidence must be in (0, 1), got {self.confidence!r}")
        else:
            raise ValueError(f"unknown decision rule kind {self.kind!r}")

    @classmethod
    def fixed(cls, tolerance: float) -> "DecisionRule":
        return cls(FIXED_TOLERANCE, tolerance=tolerance)

    @classmethod
    def wilson(cls, confidence: float = 0.99) -> "DecisionRule":
        return cls(WILSON_INTERVAL, confidence=confidence)

    @classmethod
    def exact_binomial(cls, confidence: float = 0.99) -> "DecisionRule":
        return cls(EXACT_BINOMIAL, confidence=confidence)


@dataclass(frozen=True)
class DecisionOutcome:
    """Verdict plus the numbers that produced it.

    bound_low/bound_high hold the tolerance band or Wilson interval for the
    band-style rules, p_value holds the exact-test p-value; the unused
    fields stay None.
    """

    decision: str
    statistic: float
    bound_low: float | None = None
    bound_high: float | None = None
    p_value: float | None = None

    @property
    def accepted(self) -> bool:
        return self.decision == ACCEPT


@dataclass(frozen=True)
class SampleSizeSpec:
    """An error budget: a expected errors out of n = a + b marked positions."""

    a: int
    b: int
    n: int


def relative_frequency(errors: int, total: int) -> float:
    """Observed error fraction errors/total."""
    if total <= 0:
        raise ZeroTotal(f"sample size must be positive, got {total}")
    if errors < 0:
        raise ValueError(f"error count must be nonnegative, got {errors}")
    if errors > total:
        raise CountExceedsTotal(f"{errors} errors in a sample of {total}")
    return errors / total


def _wilson_bounds(errors: int, total: int, confidence: float) -> tuple[float, float]:
    z = NormalDist().inv_cdf((1.0 + confidence) / 2.0)
    phat = errors / total
    z2 = z * z
    denom = 1.0 + z2 / total
    centre = (phat + z2 / (2.0 * total)) / denom
    margin = (z / denom) * math.sqrt(phat * (1.0 - phat) / total + z2 / (4.0 * total * total))
    return max(0.0, centre - margin), min(1.0, centre + margin)


def _binomial_pmf_row(n: int, p: float) -> list[float]:
    """Binomial(n, p) pmf for k = 0..n, via log-gamma so n = 100000 cannot overflow."""
    if p == 0.0:
        return [1.0] + [0.0] * n
    if p == 1.0:
        return [0.0] * n + [1.0]
    log_p = math.log(p)
    log_q = math.log1p(-p)
    lg = math.lgamma
    lg_n = lg(n + 1)
    return [
        math.exp(lg_n - lg(k + 1) - lg(n - k + 1) + k * log_p + (n - k) * log_q)
        for k in range(n + 1)
    ]


def _exact_binomial_p_value(errors: int, total: int, rate: float) -> float:
    """Two-sided exact p-value for errors out of total under Binomial(total, rate).

    Minimum-likelihood convention: sum the probability of every outcome no
    more likely than the observed one.
    """
    pmf = _binomial_pmf_row(total, rate)
    cutoff = pmf[errors] * (1.0 + _PMF_TIE_SLACK)
    return min(1.0, math.fsum(v for v in pmf if v <= cutoff))


def decide(errors: int, total: int, expected_pe: float, rule: DecisionRule) -> DecisionOutcome:
    """Apply rule to an observed error count against the expected flip rate."""
    statistic = relative_frequency(errors, total)
    if not 0.0 <= expected_pe <= 1.0:
        raise InvalidProbability(f"expected rate must be in [0, 1], got {expected_pe}")
    if rule.kind == FIXED_TOLERANCE:
        low = statistic - rule.tolerance
        high = statistic + rule.tolerance
        decision = ACCEPT if low <= expected_pe <= high else REJECT
        return DecisionOutcome(decision, statistic, bound_low=low, bound_high=high)
    if rule.kind == WILSON_INTERVAL:
        low, high = _wilson_bounds(errors, total, rule.confidence)
        decision = ACCEPT if low <= expected_pe <= high else REJECT
        return DecisionOutcome(decision, statistic, bound_low=low, bound_high=high)
    p_value = _exact_binomial_p_value(errors, total, expected_pe)
    alpha = 1.0 - rule.confidence
    decision = ACCEPT if p_value > alpha else REJECT
    return DecisionOutcome(decision, statistic, p_value=p_value)


def min_sample_size_literal(pe: float) -> SampleSizeSpec:
    """Smallest n = a + b with a/(a+b) >= pe, ties broken by smallest a.

    Taken literally this admits n = 1 for every pe (a = 1, b = 0 whenever
    pe > 0), so it is a floor rather than a usable sample size; see
    recommended_sample_size for actual guidance.
    """
    if not 0.0 <= pe <= 1.0:
        raise InvalidProbability(f"pe must be in [0, 1], got {pe}")
    n = 1
    while True:
        for a in range(n + 1):
            if a / n >= pe:
                return SampleSizeSpec(a=a, b=n - a, n=n)
        n += 1


def _rejection_power(n: int, pe: float, null_rate: float, alpha: float) -> float:
    """P[the exact test at level alpha rejects rate pe] when bits flip at null_rate."""
    pmf0 = _binomial_pmf_row(n, pe)
    order = sorted(range(n + 1), key=pmf0.__getitem__)
    vals = [pmf0[k] for k in order]
    # p-value of outcome k is the total mass of outcomes no more likely;
    # two pointers over the sorted masses give all n+1 p-values in one pass
    pvals = [0.0] * (n + 1)
    running = 0.0
    j = 0
    for i in range(n + 1):
        cutoff = vals[i] * (1.0 + _PMF_TIE_SLACK)
        while j <= n and vals[j] <= cutoff:
            running += vals[j]
            j += 1
        pvals[order[i]] = running
    pmf1 = _binomial_pmf_row(n, null_rate)
    return math.fsum(pmf1[k] for k in range(n + 1) if pvals[k] <= alpha)


def recommended_sample_size(pe: float, null_rate: float, confidence: float, power: float) -> int:
    """Smallest index-set size whose exact-binomial verification tells pe from null_rate.

    Returns the least n such that a test of H0 "bits flip at rate pe" at the
    given confidence rejects with probability >= power when the true flip
    rate is null_rate (0.0 models an unwatermarked copy). Raises Unachievable
    when no n up to MAX_SAMPLE_SIZE suffices.
    """
    if not 0.0 < pe < 1.0:
        raise InvalidProbability(f"pe must be in (0, 1), got {pe}")
    if not 0.0 <= null_rate < 1.0:
        raise InvalidProbability(f"null rate must be in [0, 1), got {null_rate}")
    if not 0.0 < confidence < 1.0:
        raise InvalidProbability(f"confidence must be in (0, 1), got {confidence}")
    if not 0.0 < power < 1.0:
        raise InvalidProbability(f"power must be in (0, 1), got {power}")
    if pe == null_rate:
        raise RatesEqual("pe and null rate are identical, no sample size separates them")

    alpha = 1.0 - confidence

    def achieves(n: int) -> bool:
        return _rejection_power(n, pe, null_rate, alpha) >= power

    # power climbs with n apart from small discreteness ripples: double to
    # bracket the boundary, bisect, then rescan a short window below
    low, high = 0, 1
    while not achieves(high):
        low = high
        if high >= MAX_SAMPLE_SIZE:
            raise Unachievable(
                f"no sample size up to {MAX_SAMPLE_SIZE} reaches power {power}"
                f" for pe={pe} against null rate {null_rate}"
            )
        high = min(high * 2, MAX_SAMPLE_SIZE)
    while high - low > 1:
        mid = (low + high) // 2
        if achieves(mid):
            high = mid
        else:
            low = mid
    best = high
    # bisection trusts monotonicity; the ripples are local, so checking a
    # fixed window below the boundary recovers any smaller passing size
    for n in range(max(1, best - 64), best):
        if achieves(n):
            best = n
            break
    return best
