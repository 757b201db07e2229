"""Protocol core: build qubit messages, embed the mark, observe, verify.

Embedding measures the qubits at a secret index set in the message's own
writing basis and rewrites the observed values in a dissimilar marking
basis. When anyone later observes the message back in the writing basis,
each marked position reads flipped with probability sin^2 of the angle
between the two bases, while every other position reads back exactly.
Ownership is then a statistical claim: the relative flip frequency over the
secret positions matches the expected rate.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import stats
from .errors import (
    BasisMismatch,
    BasisNotDissimilar,
    EmptyMessage,
    IndexOutOfRange,
    InvalidProbability,
    LengthMismatch,
    SampleTooSmall,
)
from .qstate import (
    Basis,
    RandomSource,
    RebitState,
    encode_bit,
    expected_error_probability,
    measure,
)

__all__ = [
    "COMFORTABLE_MARK_COUNT",
    "WEAK_PE_THRESHOLD",
    "SmallSampleWarning",
    "WeakWatermarkWarning",
    "QuantumMessage",
    "WatermarkSecret",
    "ObservedMessage",
    "VerificationReport",
    "build_message",
    "embed",
    "observe",
    "verify",
    "classical_flip_embed",
]

COMFORTABLE_MARK_COUNT = 64  # below this, embed warns that verification is shaky
WEAK_PE_THRESHOLD = 0.05


class SmallSampleWarning(UserWarning):
    """The index set is small enough to make verification unreliable."""


class WeakWatermarkWarning(UserWarning):
    """The basis pair flips so rarely the mark is hard to tell from no mark."""


def _check_bitstring(bits: str) -> str:
    if not isinstance(bits, str):
        raise TypeError(f"bits must be a str of '0'/'1', got {type(bits).__name__}")
    if not bits:
        raise EmptyMessage("message bits must be nonempty")
    if set(bits) - {"0", "1"}:
        raise ValueError("bits may contain only '0' and '1'")
    return bits


def _check_indices(indices: Sequence[int], length: int) -> None:
    # indices arrive sorted, so the ends bound the whole set
    if indices and (indices[0] < 0 or indices[-1] >= length):
        raise IndexOutOfRange(
            f"indices must lie in [0, {length}), got {indices[0]}..{indices[-1]}"
        )


@dataclass(frozen=True)
class QuantumMessage:
    """Ordered rebit states plus the basis the unmarked positions are written in."""

    states: tuple[RebitState, ...]
    writing_basis: Basis

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", tuple(self.states))
        if not self.states:
            raise EmptyMessage("a quantum message needs at least one qubit")

    def __len__(self) -> int:
        return len(self.states)


@dataclass(frozen=True)
class WatermarkSecret:
    """Verification secret: marked positions, marking basis, optional key bytes.

    indices must be strictly increasing; the key is carried only so a stored
    secret can re-derive or audit its own index set.
    """

    indices: tuple[int, ...]
    mark_basis: Basis
    key: bytes | None = None

    def __post_init__(self) -> None:
        indices = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", indices)
        if not indices:
            raise ValueError("index set must not be empty")
        if indices[0] < 0:
            raise IndexOutOfRange(f"indices must be nonnegative, got {indices[0]}")
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValueError("indices must be strictly increasing")


@dataclass(frozen=True)
class ObservedMessage:
    """Classical bits produced by measuring every qubit of a message in one basis."""

    bits: str
    observation_basis: Basis

    def __post_init__(self) -> None:
        _check_bitstring(self.bits)

    def __len__(self) -> int:
        return len(self.bits)


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of comparing a suspect observation against the retained reference."""

    error_count: int
    sample_size: int
    observed_frequency: float
    expected_pe: float
    decision: str
    decision_detail: stats.DecisionOutcome

    @property
    def accepted(self) -> bool:
        return self.decision == stats.ACCEPT


def build_message(bits: str, basis: Basis) -> QuantumMessage:
    """Encode classical bits as eigenstates of basis, one qubit per bit."""
    _check_bitstring(bits)
    states = tuple(encode_bit(int(b), basis) for b in bits)
    return QuantumMessage(states=states, writing_basis=basis)


def embed(
    message: QuantumMessage,
    secret: WatermarkSecret,
    rng: RandomSource,
    strict: bool = False,
) -> QuantumMessage:
    """Rewrite the qubits at the secret positions in the marking basis.

    Each marked qubit is measured in the message's writing basis and the
    observed bit re-encoded in the marking basis, consuming one rng draw per
    marked position in increasing index order. The input message is left
    untouched. With strict set, an index set too small for reliable
    verification raises instead of warning.
    """
    _check_indices(secret.indices, len(message))
    if not secret.mark_basis.is_dissimilar_to(message.writing_basis):
        raise BasisNotDissimilar(
            "marking basis equals the writing basis; the mark would never flip"
        )
    pe = expected_error_probability(secret.mark_basis, message.writing_basis)
    if pe < WEAK_PE_THRESHOLD:
        warnings.warn(
            f"flip probability {pe:.4g} is hard to tell from an unwatermarked copy",
            WeakWatermarkWarning,
            stacklevel=2,
        )
    if strict:
        needed = max(
            stats.min_sample_size_literal(pe).n,
            stats.recommended_sample_size(pe, 0.0, confidence=0.99, power=0.99),
        )
        if len(secret.indices) < needed:
            raise SampleTooSmall(
                f"{len(secret.indices)} marked positions, strict embedding needs {needed}"
            )
    elif len(secret.indices) < COMFORTABLE_MARK_COUNT:
        warnings.warn(
            f"only {len(secret.indices)} marked positions; verification on so few"
            " is statistically weak",
            SmallSampleWarning,
            stacklevel=2,
        )
    states = list(message.states)
    for i in secret.indices:
        observed = measure(states[i], message.writing_basis, rng)
        states[i] = encode_bit(observed, secret.mark_basis)
    return QuantumMessage(states=tuple(states), writing_basis=message.writing_basis)


def observe(message: QuantumMessage, basis: Basis, rng: RandomSource) -> ObservedMessage:
    """Measure every qubit in basis, consuming one draw per position in order."""
    bits = "".join("1" if measure(state, basis, rng) else "0" for state in message.states)
    return ObservedMessage(bits=bits, observation_basis=basis)


def verify(
    suspect: ObservedMessage,
    reference: ObservedMessage,
    secret: WatermarkSecret,
    rule: stats.DecisionRule,
) -> VerificationReport:
    """Decide whether a suspect observation carries the watermark.

    The reference is the owner's record of the original message observed in
    its writing basis, which for eigenstate messages is simply the original
    plaintext. Only the secret positions are compared; the expected flip
    rate is recomputed from the marking basis and the observation basis.
    """
    if len(suspect) != len(reference):
        raise LengthMismatch(
            f"suspect has {len(suspect)} bits, reference has {len(reference)}"
        )
    if suspect.observation_basis != reference.observation_basis:
        raise BasisMismatch("suspect and reference were observed in different bases")
    _check_indices(secret.indices, len(suspect))
    errors = sum(1 for i in secret.indices if suspect.bits[i] != reference.bits[i])
    total = len(secret.indices)
    pe = expected_error_probability(secret.mark_basis, suspect.observation_basis)
    outcome = stats.decide(errors, total, pe, rule)
    return VerificationReport(
        error_count=errors,
        sample_size=total,
        observed_frequency=outcome.statistic,
        expected_pe=pe,
        decision=outcome.decision,
        decision_detail=outcome,
    )


def classical_flip_embed(
    bits: str,
    indices: Iterable[int],
    pe: float,
    rng: RandomSource,
) -> str:
    """Classical twin of embed-then-observe: flip each indexed bit with probability pe.

    Draws once per index in increasing order, so transcripts are directly
    comparable with the quantum pipeline's statistics.
    """
    _check_bitstring(bits)
    if not 0.0 <= pe <= 1.0:
        raise InvalidProbability(f"flip probability must be in [0, 1], got {pe}")
    order = sorted({int(i) for i in indices})
    _check_indices(order, len(bits))
    out = list(bits)
    for i in order:
        if rng.draw() < pe:
            out[i] = "0" if out[i] == "1" else "1"
    return "".join(out)
