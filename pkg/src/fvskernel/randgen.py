"""Deterministic randomness: a portable 64-bit generator and random digraphs.

Everything here is reproducible from explicit integer seeds.  The generator is
SplitMix64, chosen because the whole stream is pinned by a handful of
constants and is trivial to re-implement elsewhere; the seed-splitting rule
for derived per-trial seeds is documented in the README.
"""

from __future__ import annotations

from .digraph import Digraph

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(x: int) -> int:
    """SplitMix64 finalizer (Steele/Lea/Flood mixing constants)."""
    x &= _MASK
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK
    x ^= x >> 31
    return x


class SplitMix64:
    """The SplitMix64 sequence: state advances by the golden gamma, then mixes."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK
        return mix64(self._state)


def derive_seed(seed: int, index: int) -> int:
    """Seed for the ``index``-th derived stream: mix64(seed + (index+1)*gamma)."""
    if index < 0:
        raise ValueError("index must be non-negative")
    return mix64((seed + (index + 1) * _GOLDEN) & _MASK)


def random_digraph(n: int, p: float, allow_loops: bool = False, seed: int = 0) -> Digraph:
    """Erdos-Renyi style digraph: each ordered pair independently with probability p.

    Vertices are labeled ``v0 .. v(n-1)``.  Ordered pairs are drawn tail-major
    in index order; when loops are disabled, the diagonal consumes no draw, so
    the loop flag changes the stream alignment (documented in the README).
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be within [0, 1], got {p}")
    threshold = int(p * (1 << 64))
    rng = SplitMix64(seed)
    labels = [f"v{i}" for i in range(n)]
    arcs = []
    for tail in labels:
        for head in labels:
            if tail == head and not allow_loops:
                continue
            if rng.next_u64() < threshold:
                arcs.append((tail, head))
    return Digraph(labels, arcs)
