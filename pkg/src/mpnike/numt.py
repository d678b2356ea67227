"""Arbitrary-precision modular arithmetic, primality testing and prime search.

Everything here is pure integer math.  Callers supply an entropy source
(`Rng`) so seeded runs reproduce byte for byte, and every modular
exponentiation is routed through `mod_exp` so callers can count group
operations with `count_mod_exps`.
"""

from __future__ import annotations

import random
import re
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .errors import ExhaustedAttempts, FormatError, InvalidInput, NotInvertible

_MR_ROUNDS = 64


def _sieve(limit: int) -> list[int]:
    flags = bytearray([1]) * limit
    flags[0:2] = b"\x00\x00"
    for i in range(2, int(limit**0.5) + 1):
        if flags[i]:
            flags[i * i :: i] = b"\x00" * len(flags[i * i :: i])
    return [i for i in range(limit) if flags[i]]


# Dividing by every prime below 256 proves primality for candidates below
# 2**16; the longer tail just cheapens Miller-Rabin on large candidates.
_SMALL_PRIMES = _sieve(4096)
_TRIAL_PROOF_LIMIT = 1 << 16


class Rng:
    """Entropy source: seeded and deterministic, or backed by the OS.

    With `seed=None` draws come from SystemRandom; otherwise from a
    deterministic PRNG, so two Rng instances with the same seed emit
    identical streams.
    """

    def __init__(self, seed: Optional[int] = None):
        self.seed = seed
        self._rand: random.Random
        if seed is None:
            self._rand = random.SystemRandom()
        else:
            self._rand = random.Random(seed)

    def getrandbits(self, bits: int) -> int:
        if bits < 1:
            raise InvalidInput("bit count must be positive")
        return self._rand.getrandbits(bits)

    def randrange(self, lo: int, hi: int) -> int:
        if hi <= lo:
            raise InvalidInput(f"empty range [{lo}, {hi})")
        return self._rand.randrange(lo, hi)

    def randbytes(self, n: int) -> bytes:
        if n < 0:
            raise InvalidInput("byte count must be nonnegative")
        return self._rand.randbytes(n)


_SYSTEM_RNG = Rng()


@dataclass(frozen=True)
class ModulusCtx:
    """A modulus plus its canonical byte width for fixed-length encodings."""

    N: int
    byte_len: int = field(init=False)

    def __post_init__(self):
        if self.N < 15 or self.N % 2 == 0:
            raise InvalidInput(f"modulus must be odd and >= 15, got {self.N}")
        object.__setattr__(self, "byte_len", (self.N.bit_length() + 7) // 8)


class ModExpCounter:
    """Tally of modular exponentiations observed while active."""

    __slots__ = ("count",)

    def __init__(self):
        self.count = 0


_ACTIVE_COUNTERS: list[ModExpCounter] = []


@contextmanager
def count_mod_exps() -> Iterator[ModExpCounter]:
    """Count every `mod_exp` call made inside the `with` block."""
    counter = ModExpCounter()
    _ACTIVE_COUNTERS.append(counter)
    try:
        yield counter
    finally:
        _ACTIVE_COUNTERS.remove(counter)


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Extended Euclid: return (g, x, y) with g = gcd(a, b) > 0 = a*x + b*y."""
    if a == 0 and b == 0:
        raise InvalidInput("gcd(0, 0) is undefined")
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def mod_inverse(a: int, n: int) -> int:
    """Inverse of a modulo n; raises NotInvertible carrying the shared gcd."""
    if n < 2:
        raise InvalidInput(f"modulus must be >= 2, got {n}")
    g, x, _ = ext_gcd(a % n, n)
    if g != 1:
        raise NotInvertible(a, n, g)
    return x % n


def mod_exp(base: int, exp: int, ctx: ModulusCtx) -> int:
    """base**exp mod ctx.N for any integer exponent.

    Negative exponents go through the modular inverse of the base, so a
    base sharing a factor with N raises NotInvertible.
    """
    n = ctx.N
    for counter in _ACTIVE_COUNTERS:
        counter.count += 1
    b = base % n
    if exp >= 0:
        return pow(b, exp, n)
    return pow(mod_inverse(b, n), -exp, n)


def is_probable_prime(n: int, rounds: int = _MR_ROUNDS, rng: Optional[Rng] = None) -> bool:
    """Trial division below 2**16 (exact there), Miller-Rabin above."""
    if rounds < 1:
        raise InvalidInput("rounds must be >= 1")
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    if n < _TRIAL_PROOF_LIMIT:
        return True
    rng = rng or _SYSTEM_RNG
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = (x * x) % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(
    bits: int,
    rng: Rng,
    rounds: int = _MR_ROUNDS,
    budget: Optional[int] = None,
) -> int:
    """Uniform probable prime with the top bit set (exactly `bits` bits)."""
    if bits < 2:
        raise InvalidInput(f"need bits >= 2, got {bits}")
    if budget is None:
        budget = max(256, 96 * bits)
    top = 1 << (bits - 1)
    for _ in range(budget):
        cand = rng.getrandbits(bits) | top
        if is_probable_prime(cand, rounds, rng):
            return cand
    raise ExhaustedAttempts(f"no {bits}-bit prime found in {budget} attempts")


_HEX_RE = re.compile(r"\A(?:0|[1-9a-f][0-9a-f]*)\Z")


def int_to_hex(n: int) -> str:
    """Canonical lowercase hex, no leading zeros, no prefix."""
    if n < 0:
        raise InvalidInput("canonical hex is defined for nonnegative integers")
    return format(n, "x")


def hex_to_int(s: str) -> int:
    """Parse canonical hex produced by int_to_hex; reject anything else."""
    if not _HEX_RE.match(s):
        raise FormatError(f"not canonical lowercase hex: {s!r}")
    return int(s, 16)
