"""Self-contained xoshiro256** PRNG with splitmix64 seeding.

Implemented here rather than on top of ``random`` so that shuffles can be
reproduced bit-for-bit outside Python from nothing but the integer seed:

* splitmix64: state += 0x9E3779B97F4A7C15; z = state;
  z = (z ^ z>>30) * 0xBF58476D1CE4E5B9; z = (z ^ z>>27) * 0x94D049BB133111EB;
  output z ^ z>>31 (all modulo 2^64).
* xoshiro256**: output = rotl64(s1 * 5, 7) * 9, then the state update
  t = s1 << 17; s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t;
  s3 = rotl64(s3, 45). The four state words are seeded with four
  consecutive splitmix64 outputs of the seed.
* shuffle: Fisher-Yates from the top, j = next_u64() % (i + 1). The modulo
  introduces bias below 2^-50 for the list sizes seen here; uniformity is
  secondary to reproducibility.
"""

from __future__ import annotations

from typing import MutableSequence

_MASK = (1 << 64) - 1


def splitmix64(state: int) -> tuple[int, int]:
    """One step: returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK


class Xoshiro256StarStar:
    def __init__(self, seed: int) -> None:
        state = seed & _MASK
        self._state = []
        for _ in range(4):
            state, word = splitmix64(state)
            self._state.append(word)

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._state
        result = (_rotl((s1 * 5) & _MASK, 7) * 9) & _MASK
        t = (s1 << 17) & _MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._state = [s0, s1, s2, s3]
        return result

    def randbelow(self, n: int) -> int:
        if n < 1:
            raise ValueError(f"randbelow needs n >= 1, got {n}")
        return self.next_u64() % n

    def shuffle(self, items: MutableSequence) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]
