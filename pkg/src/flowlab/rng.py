"""Deterministic pseudo-random generation.

All randomness in the toolkit flows through one fixed, named generator so
that identical seeds reproduce identical splits, bootstraps, and synthetic
samples on every platform:

* core generator: xorshift64* (64-bit xorshift with the 2685821657736338717
  multiplier applied to the output);
* seeding and stream derivation: the splitmix64 finalizer. ``derive_seed``
  mixes a root seed with a sequence of integer lane indices, giving each
  component (split, SMOTE, per-tree bootstrap, per-round stump, ...) its own
  documented, independent stream.

Floats come from the top 53 bits of an output word, so ``uniform()`` covers
[0, 1) on the full double grid. ``randbelow`` uses rejection sampling and is
exactly unbiased.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1


def _mix(x: int) -> int:
    # splitmix64 finalizer
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def derive_seed(seed: int, *lanes: int) -> int:
    """Derive an independent stream seed from a root seed and lane indices."""
    s = _mix(seed & _MASK)
    for lane in lanes:
        s = _mix(s ^ _mix(lane & _MASK))
    return s


class Xorshift64Star:
    """xorshift64* generator. State is a single nonzero 64-bit word."""

    def __init__(self, seed: int):
        s = _mix(seed & _MASK)
        if s == 0:  # all-zero state would be a fixed point
            s = 0x9E3779B97F4A7C15
        self._state = s

    def next64(self) -> int:
        x = self._state
        x ^= x >> 12
        x = (x ^ (x << 25)) & _MASK
        x ^= x >> 27
        self._state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK

    def uniform(self) -> float:
        """A float in [0, 1) with 53 random mantissa bits."""
        return (self.next64() >> 11) * 2.0 ** -53

    def randbelow(self, n: int) -> int:
        """An exactly uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("randbelow requires n >= 1")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next64()
            if r < limit:  # rejection keeps the draw unbiased
                return r % n

    def randbelow_block(self, n: int, count: int) -> list:
        """count draws from randbelow(n), identical to repeated single calls.

        Inlined update loop; bootstrap sampling draws millions of these.
        """
        if n <= 0:
            raise ValueError("randbelow requires n >= 1")
        limit = (1 << 64) - ((1 << 64) % n)
        out = []
        state = self._state
        mask = _MASK
        while len(out) < count:
            x = state
            x ^= x >> 12
            x = (x ^ (x << 25)) & mask
            x ^= x >> 27
            state = x
            r = (x * 0x2545F4914F6CDD1D) & mask
            if r < limit:
                out.append(r % n)
        self._state = state
        return out

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]

    def choice(self, items):
        if len(items) == 0:
            raise ValueError("choice on an empty sequence")
        return items[self.randbelow(len(items))]
