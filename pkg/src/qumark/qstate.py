"""Rebit states, measurement bases, and Born-rule measurement.

Everything here works with real-amplitude qubits in the linear-polarization
picture: a pure state is an angle phi in [0, 180) degrees whose amplitude
onto the basis vector |theta> is cos(phi - theta). A measurement basis is
the orthonormal pair {|theta>, |theta + 90>} with theta in [0, 90). Angles
phi and phi + 180 describe the same state, which is why both rings wrap.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

__all__ = [
    "ANGLE_TOLERANCE",
    "Basis",
    "RebitState",
    "RandomSource",
    "encode_bit",
    "outcome_probability",
    "measure",
    "expected_error_probability",
]

ANGLE_TOLERANCE = 1e-9  # degrees; angles closer than this count as the same angle


def _reduce_angle(value: float, period: float) -> float:
    if not math.isfinite(value):
        raise ValueError(f"angle must be finite, got {value!r}")
    reduced = value % period
    # x % period can round up to period itself for tiny negative x
    return 0.0 if reduced == period else reduced


def _ring_distance(a: float, b: float, period: float) -> float:
    d = abs(a - b)
    return min(d, period - d)


def _fold(delta: float) -> float:
    """Reduce an angle difference to [0, 90]; cos2/sin2 only need that range.

    Differences within ANGLE_TOLERANCE of a quarter turn snap onto it, the
    same identification the equality operators use. Encoding a 1 adds 90.0
    to theta, which rounds for most angles, and without the snap those
    eigenstates would carry flip probabilities of ~1e-30 instead of 0.
    """
    d = math.fabs(math.fmod(delta, 180.0))
    if d > 90.0:
        d = 180.0 - d  # exact, both operands within a factor of two
    if d <= ANGLE_TOLERANCE:
        return 0.0
    if d >= 90.0 - ANGLE_TOLERANCE:
        return 90.0
    return d


def _cos2(delta: float) -> float:
    d = _fold(delta)
    # exact quarter turns get exact probabilities, so eigenstates of the
    # measured basis behave deterministically for every rng
    if d == 0.0:
        return 1.0
    if d == 90.0:
        return 0.0
    return math.cos(math.radians(d)) ** 2


def _sin2(delta: float) -> float:
    d = _fold(delta)
    if d == 0.0:
        return 0.0
    if d == 90.0:
        return 1.0
    return math.sin(math.radians(d)) ** 2


def _check_bit(bit: int) -> int:
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {bit!r}")
    return bit


@dataclass(frozen=True, eq=False)
class Basis:
    """Writing or measurement basis {|theta>, |theta + 90>}.

    theta is reduced into [0, 90) on construction. Equality is circular with
    tolerance ANGLE_TOLERANCE, so instances are deliberately unhashable.
    """

    theta: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", _reduce_angle(float(self.theta), 90.0))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Basis):
            return NotImplemented
        return _ring_distance(self.theta, other.theta, 90.0) <= ANGLE_TOLERANCE

    def is_dissimilar_to(self, other: "Basis") -> bool:
        """True when writing in one basis and reading in the other is lossy."""
        return not self == other


@dataclass(frozen=True, eq=False)
class RebitState:
    """Pure rebit |phi> with phi reduced into [0, 180).

    Equality is circular with tolerance ANGLE_TOLERANCE (|0> and |180> are
    the same state up to a global sign).
    """

    phi: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "phi", _reduce_angle(float(self.phi), 180.0))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RebitState):
            return NotImplemented
        return _ring_distance(self.phi, other.phi, 180.0) <= ANGLE_TOLERANCE


class RandomSource:
    """Seedable stream of uniform draws in [0, 1).

    Equal seeds yield equal streams on every platform, which is what makes
    embed and observe transcripts reproducible. A source is single-consumer:
    concurrent users must take one source each, or draw order is undefined.
    """

    def __init__(self, seed: int | None = None) -> None:
        self._rng = random.Random(seed)

    def draw(self) -> float:
        """Return the next uniform draw in [0, 1)."""
        return self._rng.random()


def encode_bit(bit: int, basis: Basis) -> RebitState:
    """Write a classical bit as the matching eigenstate of basis.

    Measuring the result in the same basis returns bit with probability 1.
    """
    _check_bit(bit)
    return RebitState(basis.theta + 90.0 * bit)


def outcome_probability(state: RebitState, basis: Basis, bit: int) -> float:
    """Born-rule probability of reading bit when measuring state in basis."""
    _check_bit(bit)
    delta = state.phi - basis.theta
    return _sin2(delta) if bit else _cos2(delta)


def measure(state: RebitState, basis: Basis, rng: RandomSource) -> int:
    """Measure state in basis, consuming exactly one draw from rng.

    The simulator cannot stop a caller from re-measuring the same logical
    qubit; protocol code must treat measurement as destructive and only ever
    measure a state object once.
    """
    return 0 if rng.draw() < outcome_probability(state, basis, 0) else 1


def expected_error_probability(writing: Basis, reading: Basis) -> float:
    """Probability that a bit written in one basis reads back flipped in the other.

    Equals sin^2 of the angle between the bases; symmetric in its arguments,
    zero exactly when the bases coincide.
    """
    return outcome_probability(encode_bit(0, writing), reading, 1)
