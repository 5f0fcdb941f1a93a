"""Marked punctured-torus groups from Fenchel-Nielsen data and the Earle slice."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .moebius import MoebiusMatrix, commutator, inverse, mul
from .words import FareySlope, evaluate_word, special_word

_POLE_TOL = 1e-12


def _at_pole(lam: complex) -> bool:
    """True when lam is (numerically) in 2 pi i Z."""
    k = round(lam.imag / (2 * math.pi))
    return abs(lam.real) <= _POLE_TOL and abs(lam.imag - 2 * math.pi * k) <= _POLE_TOL


@dataclass(frozen=True)
class CfnParams:
    lam: complex
    tau: complex

    def __post_init__(self):
        object.__setattr__(self, "lam", complex(self.lam))
        object.__setattr__(self, "tau", complex(self.tau))
        if _at_pole(self.lam):
            raise ValueError(f"lambda = {self.lam} lies in 2*pi*i*Z")

    @classmethod
    def from_trace(cls, trA: float, tau: complex = 0) -> CfnParams:
        return cls(2 * math.acosh(trA / 2), tau)


@dataclass(frozen=True)
class MarkedPair:
    A: MoebiusMatrix
    B: MoebiusMatrix

    @property
    def traces(self) -> tuple[complex, complex, complex]:
        return self.A.trace, self.B.trace, mul(self.A, self.B).trace

    @property
    def commutator_trace(self) -> complex:
        return commutator(self.A, self.B).trace


@dataclass(frozen=True)
class EarleParam:
    d: complex

    def __post_init__(self):
        d = complex(self.d)
        if abs(d) <= _POLE_TOL or abs(2 * d * d + 1) <= _POLE_TOL:
            raise ValueError(f"d = {d} is excluded (d = 0 or 2d^2 + 1 = 0)")
        object.__setattr__(self, "d", d)


def cfn_generators(p: CfnParams) -> MarkedPair:
    lam, tau = p.lam, p.tau
    ch = cmath.cosh(lam / 2)
    # tanh(lam/4) via exp(-lam/2) stays accurate for large |lam|
    e = cmath.exp(-lam / 2)
    th = (1 - e) / (1 + e)
    ct, st = cmath.cosh(tau / 2), cmath.sinh(tau / 2)
    A = MoebiusMatrix(ch, ch + 1, ch - 1, ch)
    B = MoebiusMatrix(ct / th, -st, -st, ct * th)
    return MarkedPair(A, B)


def trace_twist_relation(lam: complex, tau: complex) -> complex:
    """Tr B = 2 coth(lam/2) cosh(tau/2) on the plane of fixed Tr A."""
    lam, tau = complex(lam), complex(tau)
    if _at_pole(lam):
        raise ValueError(f"coth(lambda/2) has a pole at lambda = {lam}")
    return 2 * cmath.cosh(tau / 2) / cmath.tanh(lam / 2)


def invert_twist(lam: float, trB: complex) -> complex:
    """Twist tau in the right half strip with trace_twist_relation(lam, tau) = trB.

    On the folded interval (0, 2 coth(lam/2)] the preimage is purely
    imaginary with Im tau in [0, pi). Inputs with Re trB < 0 have no preimage
    in the strip; the principal value is returned for them.
    """
    lam = float(lam)
    if lam <= 0:
        raise ValueError("lambda must be real and positive")
    trB = complex(trB)
    if trB == 0:
        raise ValueError("Tr B = 0 has no preimage in the strip")
    w = trB * math.tanh(lam / 2) / 2
    tau = 2 * cmath.acosh(w)
    if tau.real < 0:
        tau = -tau
    if tau.real == 0 and tau.imag < 0:
        tau = -tau
    return tau


def earle_generators(e: EarleParam) -> MarkedPair:
    d = e.d
    diag = (d * d + 1) / d
    upper = d ** 3 / (2 * d * d + 1)
    lower = (2 * d * d + 1) / d
    A = MoebiusMatrix(diag, upper, lower, d)
    B = MoebiusMatrix(diag, -upper, -lower, d)
    return MarkedPair(A, B)


def trace_W21(e: EarleParam) -> complex:
    """Tr(A_d^-2 B_d), the trace of the special word of slope 2/1."""
    g = earle_generators(e)
    Ai = inverse(g.A)
    return mul(mul(Ai, Ai), g.B).trace


def trace_W21_by_word(e: EarleParam) -> complex:
    g = earle_generators(e)
    return evaluate_word(special_word(FareySlope(2, 1)), g.A, g.B).trace


def maskit_traces(trB: complex) -> tuple[complex, complex, complex]:
    """Trace triple with Tr A = 2 (A parabolic); Tr AB = Tr B + 2i."""
    trB = complex(trB)
    return (2 + 0j, trB, trB + 2j)
