"""Farey slopes, the special words W_{p/q}, and trace recursions.

Letters are single characters: ``a``/``b`` for the generators alpha/beta and
``A``/``B`` for their inverses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .moebius import MoebiusMatrix, inverse, mul

MAX_SLOPE_INT = 10**9

_INVERSE = {"a": "A", "A": "a", "b": "B", "B": "b"}
_PRETTY = {"a": "α", "A": "α⁻¹", "b": "β", "B": "β⁻¹"}


@dataclass(frozen=True, order=False)
class FareySlope:
    p: int
    q: int

    def __post_init__(self):
        p, q = int(self.p), int(self.q)
        if q < 0:
            raise ValueError(f"denominator must be >= 0, got {p}/{q}")
        if abs(p) > MAX_SLOPE_INT or q > MAX_SLOPE_INT:
            raise OverflowError(f"slope {p}/{q} exceeds supported range")
        if q == 0 and p != 1:
            raise ValueError("the only slope with q = 0 is 1/0")
        if math.gcd(abs(p), q) != 1:
            raise ValueError(f"slope {p}/{q} is not in lowest terms")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def parse(cls, text: str) -> FareySlope:
        num, sep, den = text.strip().partition("/")
        if not sep:
            return cls(int(num), 1)
        return cls(int(num), int(den))

    @classmethod
    def from_vector(cls, p: int, q: int) -> FareySlope:
        """Slope of the primitive vector (p, q), identifying v with -v."""
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        return cls(p, q)

    @property
    def is_infinite(self) -> bool:
        return self.q == 0

    def value(self) -> Fraction | float:
        return math.inf if self.q == 0 else Fraction(self.p, self.q)

    def __lt__(self, other: FareySlope) -> bool:
        return self.value() < other.value()

    def __str__(self):
        return f"{self.p}/{self.q}"


@dataclass(frozen=True)
class GeneratorWord:
    letters: tuple[str, ...] = ()

    def __post_init__(self):
        letters = tuple(self.letters)
        bad = [ch for ch in letters if ch not in _INVERSE]
        if bad:
            raise ValueError(f"unknown letters {bad}")
        object.__setattr__(self, "letters", free_reduce(letters))

    @classmethod
    def parse(cls, text: str) -> GeneratorWord:
        return cls(tuple(text))

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other: GeneratorWord) -> GeneratorWord:
        return GeneratorWord(self.letters + other.letters)

    def inverse(self) -> GeneratorWord:
        return GeneratorWord(tuple(_INVERSE[ch] for ch in reversed(self.letters)))

    def substitute(self, images: dict[str, GeneratorWord]) -> GeneratorWord:
        """Apply the endomorphism given on ``a`` and ``b``."""
        out: list[str] = []
        for ch in self.letters:
            img = images[ch.lower()]
            out.extend(img.letters if ch.islower() else img.inverse().letters)
        return GeneratorWord(tuple(out))

    def __str__(self):
        return "".join(self.letters)

    def pretty(self) -> str:
        return "".join(_PRETTY[ch] for ch in self.letters) or "1"


def free_reduce(letters) -> tuple[str, ...]:
    out: list[str] = []
    for ch in letters:
        if out and out[-1] == _INVERSE[ch]:
            out.pop()
        else:
            out.append(ch)
    return tuple(out)


ZERO = FareySlope(0, 1)
INFINITY = FareySlope(1, 0)


def _shift_count(s: FareySlope) -> int:
    """Number of unit translations taking a negative slope into [0, inf)."""
    return -(s.p // s.q) if s.p < 0 else 0


def farey_parents(s: FareySlope) -> tuple[FareySlope, FareySlope]:
    """Farey neighbours (lo, hi) whose mediant is ``s``; lo < hi."""
    if s.q == 0 or (s.p == 0 and s.q == 1):
        raise ValueError(f"base slope {s} has no Farey parents")
    if s.q == 1:
        return FareySlope(s.p - 1, 1), INFINITY
    n = _shift_count(s)
    target = Fraction(s.p + n * s.q, s.q)
    lo, hi = (0, 1), (1, 0)
    while True:
        mp, mq = lo[0] + hi[0], lo[1] + hi[1]
        if (mp, mq) == (target.numerator, target.denominator):
            break
        if target < Fraction(mp, mq):
            hi = (mp, mq)
        else:
            lo = (mp, mq)
    lo = FareySlope(lo[0] - n * lo[1], lo[1])
    hi = hi if hi[1] == 0 else (hi[0] - n * hi[1], hi[1])
    return lo, FareySlope(*hi)


@lru_cache(maxsize=4096)
def _nonnegative_word(p: int, q: int) -> GeneratorWord:
    if (p, q) == (0, 1):
        return GeneratorWord(("b",))
    if (p, q) == (1, 0):
        return GeneratorWord(("A",))
    lo, hi = farey_parents(FareySlope(p, q))
    return _nonnegative_word(hi.p, hi.q) * _nonnegative_word(lo.p, lo.q)


def special_word(s: FareySlope) -> GeneratorWord:
    """The canonical word W_{p/q} representing the curve of slope p/q.

    Built from W_{0/1} = b, W_{1/0} = A by W_{(p+r)/(q+s)} = W_{r/s} W_{p/q}
    over Farey neighbours p/q < r/s. Negative slopes are reached by the
    twist b -> a^n b, which sends W_{(p+nq)/q} to W_{p/q}.
    """
    n = _shift_count(s)
    if n == 0:
        return _nonnegative_word(s.p, s.q)
    base = _nonnegative_word(s.p + n * s.q, s.q)
    twist = GeneratorWord(("a",) * n + ("b",))
    return base.substitute({"a": GeneratorWord(("a",)), "b": twist})


def evaluate_word(w: GeneratorWord, A: MoebiusMatrix, B: MoebiusMatrix) -> MoebiusMatrix:
    mats = {"a": A, "A": inverse(A), "b": B, "B": inverse(B)}
    out = MoebiusMatrix.identity()
    for ch in w.letters:
        out = mul(out, mats[ch])
    return out


def trace_AnB(n: int, trA: complex, trB: complex, trAB: complex) -> complex:
    """Tr(A^n B) from Tr A^k B = Tr A * Tr A^(k-1) B - Tr A^(k-2) B."""
    if n < 0:
        raise ValueError("n must be >= 0")
    prev, cur = complex(trB), complex(trAB)
    if n == 0:
        return prev
    for _ in range(n - 1):
        prev, cur = cur, trA * cur - prev
    return cur


def trace_AnB_sequence(nmax: int, trA: complex, trB: complex, trAB: complex) -> list[complex]:
    """[Tr A^0 B, ..., Tr A^nmax B]."""
    seq = [complex(trB), complex(trAB)]
    while len(seq) <= nmax:
        seq.append(trA * seq[-1] - seq[-2])
    return seq[: nmax + 1]


def slopes_up_to(qmax: int, pmax: int | None = None):
    """Non-negative slopes p/q with 1 <= q <= qmax (and p <= pmax), plus 1/0."""
    yield INFINITY
    for q in range(1, qmax + 1):
        top = pmax if pmax is not None else q
        for p in range(0, top + 1):
            if math.gcd(p, q) == 1:
                yield FareySlope(p, q)
