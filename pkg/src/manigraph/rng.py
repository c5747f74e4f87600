"""Deterministic pseudo-random numbers for the clustering stage.

k-means++ seeding must be bit-reproducible across platforms and across
implementation languages, so the generator is fully specified here by its
update equations rather than delegated to a platform RNG. All arithmetic is
on 64-bit unsigned integers (wrapping mod 2^64); ``rotl(x, r)`` is rotation
left by ``r`` bits.

splitmix64, used for state expansion (state ``z``):

    z <- z + 0x9E3779B97F4A7C15
    x <- z
    x <- (x xor (x >> 30)) * 0xBF58476D1CE4E5B9
    x <- (x xor (x >> 27)) * 0x94D049BB133111EB
    output: x xor (x >> 31)

xoshiro256** (state ``s0..s3``, all-zero state forbidden):

    output <- rotl(s1 * 5, 7) * 9
    t  <- s1 << 17
    s2 <- s2 xor s0
    s3 <- s3 xor s1
    s1 <- s1 xor s2
    s0 <- s0 xor s3
    s2 <- s2 xor t
    s3 <- rotl(s3, 45)

Seeding: ``Xoshiro256(seed)`` takes the first four splitmix64 outputs with
initial state ``z = seed``. Independent per-restart streams are derived as

    stream_seed(seed, r) = mix64(mix64(seed) + (r + 1) * 0xD2B74407B1CE6E93)

where ``mix64`` is the splitmix64 output function applied to its argument
(the three xor/multiply lines above, without the additive constant).

Uniform doubles take the top 53 bits: ``(u >> 11) * 2^-53``. Bounded integer
draws use ``floor(uniform() * n)`` -- the ~2^-53 modulo bias is irrelevant at
clustering sample sizes and keeps the recipe trivially portable.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_STREAM = 0xD2B74407B1CE6E93


def mix64(x: int) -> int:
    """splitmix64 output function (finalizer) on a 64-bit word."""
    x &= _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return (x ^ (x >> 31)) & _MASK


def splitmix64_stream(seed: int):
    """Infinite generator of splitmix64 outputs from initial state ``seed``."""
    z = seed & _MASK
    while True:
        z = (z + _GOLDEN) & _MASK
        yield mix64(z)


def stream_seed(seed: int, index: int) -> int:
    """Derive the seed of sub-stream ``index`` from a master seed."""
    return mix64((mix64(seed) + ((index + 1) * _STREAM & _MASK)) & _MASK)


def _rotl(x: int, r: int) -> int:
    return ((x << r) | (x >> (64 - r))) & _MASK


class Xoshiro256:
    """xoshiro256** generator seeded via splitmix64."""

    __slots__ = ("_s",)

    def __init__(self, seed: int):
        sm = splitmix64_stream(seed)
        s = [next(sm) for _ in range(4)]
        if not any(s):  # all-zero state is a fixed point; cannot happen for
            s[0] = 1    # splitmix64 outputs, guarded anyway
        self._s = s

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        out = (_rotl((s1 * 5) & _MASK, 7) * 9) & _MASK
        t = (s1 << 17) & _MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return out

    def uniform(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def index(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("n must be positive")
        i = int(self.uniform() * n)
        return n - 1 if i >= n else i

    def weighted_index(self, cumweights) -> int:
        """Draw an index proportionally to non-negative weights.

        ``cumweights`` is the inclusive cumulative sum; a zero total falls
        back to a uniform draw.
        """
        total = float(cumweights[-1])
        n = len(cumweights)
        if total <= 0.0:
            return self.index(n)
        r = self.uniform() * total
        lo, hi = 0, n - 1
        while lo < hi:  # first index with cumweights[i] > r
            mid = (lo + hi) // 2
            if cumweights[mid] > r:
                hi = mid
            else:
                lo = mid + 1
        return lo
