"""Versioned JSON serialization of secrets, qubit messages, and observations.

Angles are stored as fixed-point strings with six decimal places so that
decode followed by encode is byte-identical on every platform; floats in
JSON would round-trip through repr and invite drift. Observation bits are
packed big-endian into base64 with the exact bit length alongside. Each
format carries a version field, and reading any other version is a hard
error rather than a guess.
"""

from __future__ import annotations

import base64
import binascii
import json

from .errors import MalformedFile, UnsupportedVersion
from .qstate import Basis, RebitState
from .watermark import ObservedMessage, QuantumMessage, WatermarkSecret

__all__ = [
    "SECRET_FORMAT_VERSION",
    "MESSAGE_FORMAT_VERSION",
    "OBSERVATION_FORMAT_VERSION",
    "dump_secret",
    "load_secret",
    "dump_quantum_message",
    "load_quantum_message",
    "dump_observation",
    "load_observation",
]

SECRET_FORMAT_VERSION = 1
MESSAGE_FORMAT_VERSION = 1
OBSERVATION_FORMAT_VERSION = 1


def _format_angle(value: float) -> str:
    return f"{value:.6f}"


def _parse_angle(value: object, field: str, period: float) -> float:
    if not isinstance(value, str):
        raise MalformedFile(f"{field} must be a fixed-point string, got {type(value).__name__}")
    try:
        angle = float(value)
    except ValueError:
        raise MalformedFile(f"{field} is not a number: {value!r}") from None
    if not 0.0 <= angle < period:
        raise MalformedFile(f"{field} must lie in [0, {period:g}), got {value}")
    return angle


def _dump(document: dict) -> str:
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def _load(text: str | bytes, expected_version: int, kind: str) -> dict:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedFile(f"{kind} file is not valid JSON: {exc}") from None
    if not isinstance(document, dict):
        raise MalformedFile(f"{kind} file must hold a JSON object")
    version = document.get("version")
    if version != expected_version:
        raise UnsupportedVersion(
            f"{kind} file has version {version!r}, this build reads version {expected_version}"
        )
    return document


def _field(document: dict, name: str, kind: str) -> object:
    if name not in document:
        raise MalformedFile(f"{kind} file is missing field {name!r}")
    return document[name]


def dump_secret(secret: WatermarkSecret, expected_pe: float) -> str:
    """Serialize a secret; expected_pe records the flip rate planned at key time.

    The stored rate is advisory. Verification recomputes the rate from the
    bases actually in play, so editing this field cannot flip a verdict.
    """
    key_field = None
    if secret.key is not None:
        key_field = base64.b64encode(secret.key).decode("ascii")
    return _dump(
        {
            "version": SECRET_FORMAT_VERSION,
            "indices": list(secret.indices),
            "mark_basis_theta": _format_angle(secret.mark_basis.theta),
            "key": key_field,
            "expected_pe": expected_pe,
        }
    )


def load_secret(text: str | bytes) -> tuple[WatermarkSecret, float]:
    document = _load(text, SECRET_FORMAT_VERSION, "secret")
    indices = _field(document, "indices", "secret")
    if not isinstance(indices, list) or not all(isinstance(i, int) for i in indices):
        raise MalformedFile("secret indices must be a list of integers")
    theta = _parse_angle(_field(document, "mark_basis_theta", "secret"), "mark_basis_theta", 90.0)
    key_field = _field(document, "key", "secret")
    key = None
    if key_field is not None:
        if not isinstance(key_field, str):
            raise MalformedFile("secret key must be a base64 string or null")
        try:
            key = base64.b64decode(key_field, validate=True)
        except (binascii.Error, ValueError):
            raise MalformedFile("secret key is not valid base64") from None
    expected_pe = _field(document, "expected_pe", "secret")
    if not isinstance(expected_pe, (int, float)) or isinstance(expected_pe, bool):
        raise MalformedFile("expected_pe must be a number")
    try:
        secret = WatermarkSecret(indices=tuple(indices), mark_basis=Basis(theta), key=key)
    except ValueError as exc:
        raise MalformedFile(f"secret file holds an invalid secret: {exc}") from None
    return secret, float(expected_pe)


def dump_quantum_message(message: QuantumMessage) -> str:
    return _dump(
        {
            "version": MESSAGE_FORMAT_VERSION,
            "writing_basis_theta": _format_angle(message.writing_basis.theta),
            "states": [_format_angle(state.phi) for state in message.states],
        }
    )


def load_quantum_message(text: str | bytes) -> QuantumMessage:
    document = _load(text, MESSAGE_FORMAT_VERSION, "message")
    theta = _parse_angle(
        _field(document, "writing_basis_theta", "message"), "writing_basis_theta", 90.0
    )
    states = _field(document, "states", "message")
    if not isinstance(states, list):
        raise MalformedFile("message states must be a list")
    parsed = tuple(RebitState(_parse_angle(phi, "state phi", 180.0)) for phi in states)
    try:
        return QuantumMessage(states=parsed, writing_basis=Basis(theta))
    except ValueError as exc:
        raise MalformedFile(f"message file holds an invalid message: {exc}") from None


def _pack_bits(bits: str) -> bytes:
    padded = bits + "0" * (-len(bits) % 8)
    return bytes(int(padded[i : i + 8], 2) for i in range(0, len(padded), 8))


def _unpack_bits(data: bytes, bit_length: int) -> str:
    if not bit_length <= 8 * len(data) < bit_length + 8:
        raise MalformedFile(
            f"bit length {bit_length} inconsistent with a {len(data)}-byte payload"
        )
    bits = "".join(f"{byte:08b}" for byte in data)
    if "1" in bits[bit_length:]:
        raise MalformedFile("observation padding bits must be zero")
    return bits[:bit_length]


def dump_observation(observation: ObservedMessage) -> str:
    packed = _pack_bits(observation.bits)
    return _dump(
        {
            "version": OBSERVATION_FORMAT_VERSION,
            "observation_basis_theta": _format_angle(observation.observation_basis.theta),
            "bit_length": len(observation.bits),
            "bits": base64.b64encode(packed).decode("ascii"),
        }
    )


def load_observation(text: str | bytes) -> ObservedMessage:
    document = _load(text, OBSERVATION_FORMAT_VERSION, "observation")
    theta = _parse_angle(
        _field(document, "observation_basis_theta", "observation"),
        "observation_basis_theta",
        90.0,
    )
    bit_length = _field(document, "bit_length", "observation")
    if not isinstance(bit_length, int) or isinstance(bit_length, bool) or bit_length < 1:
        raise MalformedFile("bit_length must be a positive integer")
    encoded = _field(document, "bits", "observation")
    if not isinstance(encoded, str):
        raise MalformedFile("observation bits must be a base64 string")
    try:
        packed = base64.b64decode(encoded, validate=True)
    except (binascii.Error, ValueError):
        raise MalformedFile("observation bits are not valid base64") from None
    bits = _unpack_bits(packed, bit_length)
    try:
        return ObservedMessage(bits=bits, observation_basis=Basis(theta))
    except ValueError as exc:
        raise MalformedFile(f"observation file holds an invalid observation: {exc}") from None
