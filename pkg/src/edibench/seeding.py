"""Deterministic seed derivation so parallel and serial runs agree."""
from __future__ import annotations

_MASK = (1 << 64) - 1


def _splitmix64(state: int) -> int:
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def mix64(*parts) -> int:
    """Hash an arbitrary tuple of ints/strings into a 64-bit seed."""
    acc = 0x243F6A8885A308D3
    for part in parts:
        if isinstance(part, str):
            for ch in part.encode():
                acc = _splitmix64(acc ^ ch)
        else:
            acc = _splitmix64(acc ^ (int(part) & _MASK))
    return acc
