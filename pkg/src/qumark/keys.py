"""Secret management: keys and the keyed derivation of watermark index sets.

The index set is a keyed pseudorandom sample of the eligible positions. A
keyed BLAKE2b in counter mode is expanded into unbiased integers that drive
a partial Fisher-Yates shuffle, so equal (key, params) pairs always select
the same set and the key holder can regenerate the set on demand instead of
storing it. Changing any of this is a format-breaking change: previously
issued keys would stop locating their watermarks.
"""

from __future__ import annotations

import hashlib
import os
import random
from dataclasses import dataclass

from .errors import TooFewEligiblePositions
from .qstate import Basis
from .watermark import WatermarkSecret

__all__ = [
    "MIN_KEY_BYTES",
    "SecretKey",
    "DerivationParams",
    "derive_indices",
    "generate_secret",
]

MIN_KEY_BYTES = 16

_PERSONALIZATION = b"qumark.indices"  # domain-separates this use of the key


@dataclass(frozen=True)
class SecretKey:
    """Opaque key bytes, at least MIN_KEY_BYTES long."""

    data: bytes

    def __post_init__(self) -> None:
        if not isinstance(self.data, (bytes, bytearray)):
            raise TypeError(f"key data must be bytes, got {type(self.data).__name__}")
        object.__setattr__(self, "data", bytes(self.data))
        if len(self.data) < MIN_KEY_BYTES:
            raise ValueError(f"key must be at least {MIN_KEY_BYTES} bytes, got {len(self.data)}")

    @classmethod
    def generate(cls, seed: int | None = None) -> "SecretKey":
        """Fresh 32-byte key, from system entropy or reproducibly from a seed."""
        if seed is None:
            return cls(os.urandom(32))
        return cls(random.Random(seed).randbytes(32))


@dataclass(frozen=True)
class DerivationParams:
    """Shape of an index-set derivation: message length, set size, optional mask.

    eligibility_mask, when given, is a '0'/'1' string of message_length marking
    the positions the watermark may occupy.
    """

    message_length: int
    mark_count: int
    eligibility_mask: str | None = None

    def __post_init__(self) -> None:
        if self.message_length < 1:
            raise ValueError(f"message length must be positive, got {self.message_length}")
        if self.mark_count < 1:
            raise ValueError(f"mark count must be positive, got {self.mark_count}")
        if self.eligibility_mask is not None:
            if len(self.eligibility_mask) != self.message_length:
                raise ValueError(
                    f"mask length {len(self.eligibility_mask)} does not match"
                    f" message length {self.message_length}"
                )
            if set(self.eligibility_mask) - {"0", "1"}:
                raise ValueError("eligibility mask may contain only '0' and '1'")
        eligible = self.eligible_count()
        if self.mark_count > eligible:
            raise TooFewEligiblePositions(
                f"asked for {self.mark_count} marks but only {eligible} positions are eligible"
            )

    def eligible_count(self) -> int:
        if self.eligibility_mask is None:
            return self.message_length
        return self.eligibility_mask.count("1")

    def eligible_positions(self) -> list[int]:
        """Positions the watermark may occupy, in increasing order."""
        if self.eligibility_mask is None:
            return list(range(self.message_length))
        return [i for i, flag in enumerate(self.eligibility_mask) if flag == "1"]


class _KeyStream:
    """Deterministic stream of 64-bit words from a keyed BLAKE2b in counter mode."""

    def __init__(self, key: SecretKey) -> None:
        raw = key.data
        if len(raw) > 64:
            raw = hashlib.blake2b(raw).digest()  # BLAKE2b keys cap at 64 bytes
        self._key = raw
        self._counter = 0
        self._words: list[int] = []

    def _refill(self) -> None:
        block = hashlib.blake2b(
            self._counter.to_bytes(8, "big"),
            key=self._key,
            person=_PERSONALIZATION,
        ).digest()
        self._counter += 1
        self._words = [
            int.from_bytes(block[i : i + 8], "big") for i in range(0, 64, 8)
        ][::-1]

    def next_word(self) -> int:
        if not self._words:
            self._refill()
        return self._words.pop()

    def below(self, bound: int) -> int:
        """Unbiased integer in [0, bound), by rejection sampling the word stream."""
        span = 1 << 64
        limit = span - span % bound
        while True:
            word = self.next_word()
            if word < limit:
                return word % bound


def derive_indices(key: SecretKey, params: DerivationParams) -> tuple[int, ...]:
    """Deterministically select params.mark_count distinct eligible positions.

    A partial Fisher-Yates shuffle over the eligible positions, driven by the
    key stream; the result is returned sorted. Without the key the selection
    is computationally indistinguishable from a uniform random subset.
    """
    pool = params.eligible_positions()
    if params.mark_count > len(pool):
        raise TooFewEligiblePositions(
            f"asked for {params.mark_count} marks but only {len(pool)} positions are eligible"
        )
    stream = _KeyStream(key)
    for i in range(params.mark_count):
        j = i + stream.below(len(pool) - i)
        pool[i], pool[j] = pool[j], pool[i]
    return tuple(sorted(pool[: params.mark_count]))


def generate_secret(key: SecretKey, params: DerivationParams, mark_basis: Basis) -> WatermarkSecret:
    """Bundle a derived index set with its marking basis and the key that made it."""
    return WatermarkSecret(
        indices=derive_indices(key, params),
        mark_basis=mark_basis,
        key=key.data,
    )
