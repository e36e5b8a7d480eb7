"""Reproducible random-number plumbing.

All randomness in the package flows through counter-based Philox
generators keyed by an explicit 64-bit seed; there is no global RNG
state.  Sub-seeds for independent runs (benchmark cells, per-image
streams, worker shards) are derived as ``seed ^ mix(run identifier)``
where ``mix`` is a splitmix64 chain over the identifier tokens, so the
same (seed, identifier) pair always yields the same stream on every
platform.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One round of the splitmix64 mixing function (public-domain constants)."""
    x = (x + _GOLDEN) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def _token_u64(token) -> int:
    if isinstance(token, (int, np.integer)):
        return int(token) & _MASK64
    if isinstance(token, float):
        token = repr(token)
    if isinstance(token, str):
        token = token.encode("utf-8")
    if isinstance(token, bytes):
        digest = hashlib.blake2b(token, digest_size=8).digest()
        return int.from_bytes(digest, "little")
    raise TypeError(f"cannot derive a seed token from {type(token).__name__}")


def derive_seed(seed: int, *tokens) -> int:
    """Derive a sub-seed as ``seed ^ mix(tokens)``.

    The token stream identifies the run (e.g. ``("cell", "frqi", 4, "0.1", 3)``).
    Tokens may be ints, floats, strings, or bytes; floats are mixed via their
    ``repr`` so the derivation is bit-stable.
    """
    acc = 0
    for token in tokens:
        acc = splitmix64(acc ^ _token_u64(token))
    return (int(seed) ^ acc) & _MASK64


def generator(seed: int) -> np.random.Generator:
    """A Philox-backed generator keyed by ``seed``."""
    return np.random.Generator(np.random.Philox(key=int(seed) & _MASK64))


def generator_at(seed: int, offset: int) -> np.random.Generator:
    """Like :func:`generator` but advanced past the first ``offset`` draws.

    Philox is counter-based, so ``generator_at(s, k)`` continues the exact
    stream ``generator(s)`` would produce after consuming ``k`` 64-bit draws.
    This is what makes sharded sampling independent of the shard split.
    ``Philox.advance`` moves whole counter blocks of four outputs, so the
    remainder is consumed draw by draw.
    """
    bitgen = np.random.Philox(key=int(seed) & _MASK64)
    blocks, remainder = divmod(int(offset), 4)
    if blocks:
        bitgen.advance(blocks)
    if remainder:
        bitgen.random_raw(remainder)
    return np.random.Generator(bitgen)
