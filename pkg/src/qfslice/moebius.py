"""SL(2, C) matrices and per-element hyperbolic geometry.

Matrices are stored as four Python complex numbers. That keeps 2x2 products
cheap and makes every value immutable and safe to share between workers.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

DET_TOL = 1e-9
PARABOLIC_TOL = 1e-9


def _finite(z: complex) -> bool:
    return math.isfinite(z.real) and math.isfinite(z.imag)


@dataclass(frozen=True)
class MoebiusMatrix:
    """Row-major 2x2 complex matrix [[a, b], [c, d]] with det = 1."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        for name in "abcd":
            v = complex(getattr(self, name))
            if not _finite(v):
                raise ValueError(f"non-finite matrix entry {name}={v!r}")
            object.__setattr__(self, name, v)

    @classmethod
    def identity(cls) -> MoebiusMatrix:
        return cls(1, 0, 0, 1)

    @classmethod
    def from_entries(cls, a, b, c, d, normalize: bool = True) -> MoebiusMatrix:
        """Build a matrix, rescaling by the principal sqrt of det if asked."""
        a, b, c, d = complex(a), complex(b), complex(c), complex(d)
        if normalize:
            det = a * d - b * c
            if det == 0:
                raise ValueError("singular matrix")
            s = cmath.sqrt(det)
            a, b, c, d = a / s, b / s, c / s, d / s
        return cls(a, b, c, d)

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> complex:
        return self.a + self.d

    def __matmul__(self, other: MoebiusMatrix) -> MoebiusMatrix:
        return mul(self, other)

    def __call__(self, z: complex) -> complex:
        return (self.a * z + self.b) / (self.c * z + self.d)

    def as_rows(self) -> list[list[complex]]:
        return [[self.a, self.b], [self.c, self.d]]

    def __repr__(self):
        return f"MoebiusMatrix([[{self.a}, {self.b}], [{self.c}, {self.d}]])"


def _renormalize(a, b, c, d):
    det = a * d - b * c
    # with large entries det is mostly rounding noise; only correct mild drift
    if det != 1 and det != 0 and max(abs(a * d), abs(b * c)) < 1e6:
        s = cmath.sqrt(det)
        a, b, c, d = a / s, b / s, c / s, d / s
    return a, b, c, d


def mul(m1: MoebiusMatrix, m2: MoebiusMatrix) -> MoebiusMatrix:
    a = m1.a * m2.a + m1.b * m2.c
    b = m1.a * m2.b + m1.b * m2.d
    c = m1.c * m2.a + m1.d * m2.c
    d = m1.c * m2.b + m1.d * m2.d
    return MoebiusMatrix(*_renormalize(a, b, c, d))


def inverse(m: MoebiusMatrix) -> MoebiusMatrix:
    # adjugate; valid because det = 1
    return MoebiusMatrix(m.d, -m.b, -m.c, m.a)


def commutator(m1: MoebiusMatrix, m2: MoebiusMatrix) -> MoebiusMatrix:
    """[m1, m2] = m1 m2 m1^-1 m2^-1."""
    return m1 @ m2 @ inverse(m1) @ inverse(m2)


def conjugate_by(p: MoebiusMatrix, m: MoebiusMatrix) -> MoebiusMatrix:
    return p @ m @ inverse(p)


@dataclass(frozen=True)
class ComplexLength:
    """Complex translation length: hyperbolic length + i * rotation angle."""

    value: complex
    parabolic: bool = False

    @property
    def length(self) -> float:
        return self.value.real

    @property
    def angle(self) -> float:
        return self.value.imag


def is_parabolic(tr: complex, tol: float = PARABOLIC_TOL) -> bool:
    return abs(tr - 2) <= tol or abs(tr + 2) <= tol


def complex_length(tr: complex) -> ComplexLength:
    """Principal complex length lambda with 2 cosh(lambda/2) = +-tr.

    Re(lambda) >= 0 and Im(lambda) in (-2pi, 2pi]. The continuous lift that
    is real on Fuchsian space is a global choice and cannot be recovered from
    a single trace; callers needing it must track the branch themselves.
    """
    tr = complex(tr)
    if not _finite(tr):
        raise ValueError(f"non-finite trace {tr!r}")
    if is_parabolic(tr):
        return ComplexLength(0j, parabolic=True)
    lam = 2 * cmath.acosh(tr / 2)
    if lam.real < 0:
        lam = -lam
    if lam.imag <= -2 * math.pi:
        lam += 4j * math.pi
    return ComplexLength(lam)


def is_purely_hyperbolic(tr: complex, eps: float) -> bool:
    if eps <= 0:
        raise ValueError("eps must be positive")
    tr = complex(tr)
    return abs(tr.imag) <= eps and abs(tr.real) > 2


def fixed_points(m: MoebiusMatrix) -> tuple[complex, complex]:
    """Fixed points on the Riemann sphere; math.inf stands for infinity."""
    if m.c == 0:
        if m.a == m.d:
            return (complex(math.inf), complex(math.inf))
        return (m.b / (m.d - m.a), complex(math.inf))
    disc = cmath.sqrt(m.trace ** 2 - 4)
    return ((m.a - m.d + disc) / (2 * m.c), (m.a - m.d - disc) / (2 * m.c))
