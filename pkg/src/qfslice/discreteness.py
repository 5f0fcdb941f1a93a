"""Per-point discreteness oracle on trace triples.

A marked punctured-torus group is determined up to conjugacy by the triple
(x, y, z) = (Tr A, Tr B, Tr AB) subject to x^2 + y^2 + z^2 = xyz. Traces of
all simple closed curves live on the complementary regions of an infinite
trivalent tree; crossing an edge replaces one entry of a triple by its
Vieta partner (z -> xy - z). The oracle walks that tree:

* reject when some simple curve is elliptic (real trace in (-2, 2)), or
  when Shimizu's lemma fails for a simple word V and the parabolic
  commutator K of a generating pair containing it. For such pairs
  Tr[V, K] = 2 + 4 Tr(V)^2, so the test is |Tr V| < 1/2;
* accept a subtree once its traces provably grow: either the newest trace
  dominates the two it was built from (both of modulus >= 2), or the
  neighbour sequence around one region is certified monotone by an
  invariant disc of the ratio map r -> x - 1/r;
* report Indeterminate when the depth or node budget runs out, or a
  simple curve is numerically parabolic.

The search starts from the edge joining Tr A and Tr B, so both roots of the
Fricke equation for Tr AB give the same verdict.
"""

from __future__ import annotations

import cmath
import enum
from dataclasses import asdict, dataclass

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

from .moebius import MoebiusMatrix, commutator
from .words import FareySlope

CUSP_TOL = 1e-9
SHIMIZU_BOUND = 0.5
FRICKE_RTOL = 1e-6

# kernel result codes
DISCRETE, INDISCRETE, INDETERMINATE = 0, 1, 2
NO_WITNESS, ELLIPTIC, SHIMIZU, DEPTH, PARABOLIC, NODES, NUMERIC = range(7)

_KIND_NAMES = {
    ELLIPTIC: "elliptic",
    SHIMIZU: "jorgensen",
    DEPTH: "depth",
    PARABOLIC: "parabolic",
    NODES: "nodes",
    NUMERIC: "numeric",
}


class Tag(str, enum.Enum):
    DISCRETE_LIKELY = "DiscreteLikely"
    INDISCRETE = "Indiscrete"
    INDETERMINATE = "Indeterminate"


_TAG_OF_CODE = {DISCRETE: Tag.DISCRETE_LIKELY, INDISCRETE: Tag.INDISCRETE,
                INDETERMINATE: Tag.INDETERMINATE}


@dataclass(frozen=True)
class OracleBudget:
    max_depth: int = 40
    grow_threshold: float = 2.001
    stop_magnitude: float = 1e8
    eps_real: float = 1e-6
    max_nodes: int = 200_000

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if not self.grow_threshold > 2:
            raise ValueError("grow_threshold must exceed 2")
        if not self.stop_magnitude > self.grow_threshold:
            raise ValueError("stop_magnitude must exceed grow_threshold")
        if not self.eps_real > 0:
            raise ValueError("eps_real must be positive")
        if self.max_nodes < 1:
            raise ValueError("max_nodes must be >= 1")

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TraceTriple:
    x: complex
    y: complex
    z: complex

    def __post_init__(self):
        for name in "xyz":
            object.__setattr__(self, name, complex(getattr(self, name)))

    def fricke_residual(self) -> float:
        """Relative defect of x^2 + y^2 + z^2 = xyz."""
        x, y, z = self.x, self.y, self.z
        scale = max(abs(x * x), abs(y * y), abs(z * z), abs(x * y * z), 1.0)
        return abs(x * x + y * y + z * z - x * y * z) / scale

    def check(self, rtol: float = FRICKE_RTOL) -> TraceTriple:
        if self.fricke_residual() > rtol:
            raise ValueError(f"{self} violates the Fricke identity (commutator trace -2)")
        return self

    def conjugate(self) -> TraceTriple:
        return TraceTriple(self.x.conjugate(), self.y.conjugate(), self.z.conjugate())

    def __iter__(self):
        return iter((self.x, self.y, self.z))


@dataclass(frozen=True)
class Witness:
    kind: str
    slope: str | None = None
    trace: complex | None = None
    depth: int = 0

    def as_dict(self) -> dict:
        out = {"kind": self.kind, "slope": self.slope, "depth": self.depth}
        if self.trace is not None:
            out["trace"] = [self.trace.real, self.trace.imag]
        if self.kind == "jorgensen":
            out["pair"] = ["K", self.slope]
        return out


@dataclass(frozen=True)
class OracleVerdict:
    tag: Tag
    witness: Witness | None = None
    depth_used: int = 0
    nodes: int = 0

    def as_dict(self) -> dict:
        return {
            "tag": self.tag.value,
            "witness": self.witness.as_dict() if self.witness else None,
            "depth_used": self.depth_used,
            "nodes": self.nodes,
        }


def markov_third_trace(x: complex, y: complex) -> tuple[complex, complex]:
    """Both roots z of z^2 - xyz + x^2 + y^2 = 0, larger modulus first."""
    x, y = complex(x), complex(y)
    s = x * y
    disc = cmath.sqrt(s * s - 4 * (x * x + y * y))
    z1, z2 = (s + disc) / 2, (s - disc) / 2
    # recover the small root from the product to avoid cancellation
    if abs(z1) < abs(z2):
        z1, z2 = z2, z1
    if z1 != 0:
        z2 = (x * x + y * y) / z1
    return z1, z2


def neighbor_move(t: TraceTriple, slot: str) -> TraceTriple:
    """Replace one entry by (product of the other two) - (old entry)."""
    x, y, z = t.x, t.y, t.z
    if slot == "x":
        return TraceTriple(y * z - x, y, z)
    if slot == "y":
        return TraceTriple(x, x * z - y, z)
    if slot == "z":
        return TraceTriple(x, y, x * y - z)
    raise ValueError(f"slot must be one of x, y, z; got {slot!r}")


def hyperbolic_locus_test(trW: complex, eps: float) -> bool:
    """Tr W is (eps-)real with |Tr W| > 2."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    trW = complex(trW)
    return abs(trW.imag) <= eps and abs(trW.real) > 2


def jorgensen_sum(V: MoebiusMatrix, W: MoebiusMatrix) -> float:
    """|Tr^2 V - 4| + |Tr [V, W] - 2|; below 1 forces indiscreteness or elementarity."""
    return abs(V.trace ** 2 - 4) + abs(commutator(V, W).trace - 2)


def realize_triple(t: TraceTriple) -> tuple[MoebiusMatrix, MoebiusMatrix]:
    """Matrices A, B with (Tr A, Tr B, Tr AB) = t, in a fixed normalization."""
    # A = [[x, 1], [-1, 0]], B = [[0, s], [-1/s, y]] gives Tr AB = -(s + 1/s)
    s = (-t.z + cmath.sqrt(t.z * t.z - 4)) / 2
    if s == 0:
        s = (-t.z - cmath.sqrt(t.z * t.z - 4)) / 2
    A = MoebiusMatrix(t.x, 1, -1, 0)
    B = MoebiusMatrix(0, s, -1 / s, t.y)
    return A, B


# ---------------------------------------------------------------------------
# search kernel (numba-compiled when available)


@njit(cache=True)
def _reject_code(c, eps):
    ac = abs(c)
    if ac < SHIMIZU_BOUND:
        return SHIMIZU
    if abs(c.imag) <= eps and abs(c.real) < 2.0 - eps:
        return ELLIPTIC
    return NO_WITNESS


@njit(cache=True)
def _near_parabolic(c, eps):
    return abs(c - 2.0) <= eps or abs(c + 2.0) <= eps


@njit(cache=True)
def _region_certified(r, p, q, r_is_cusp, floor):
    """Neighbours of the region with trace r, continuing p, q, ..., never shrink.

    The sequence obeys y_{k+1} = r y_k - y_{k-1}; its ratios follow the
    Moebius map f(w) = r - 1/w, which contracts every disc
    {|w - mu| <= rho |w - 1/mu|} (rho < 1) around its attracting fixed point
    mu. If that disc avoids the unit disc, moduli are non-decreasing forever.
    """
    ar = abs(r)
    T = floor if floor > ar else ar
    aq = abs(q)
    if aq < T:
        return False
    nxt = r * q - p
    if r_is_cusp:
        # parabolic region: sign-twisted sequence is linear, |.| is convex
        return abs(nxt) >= aq
    disc = np.sqrt(r * r - 4.0)
    mu = (r + disc) / 2.0
    if abs(mu) < 1.0:
        mu = (r - disc) / 2.0
    if abs(mu) < 1.0 + 1e-9:
        return False
    nu = 1.0 / mu
    w = nxt / q
    den = w - nu
    if den == 0:
        return False
    rho = abs((w - mu) / den)
    if rho >= 1.0:
        return False
    k = 1.0 - rho * rho
    center = (mu - rho * rho * nu) / k
    radius = rho * abs(mu - nu) / k
    return abs(center) - radius >= 1.0 + 1e-12


@njit(cache=True)
def _next_slope(ap, aq, bp, bq, cp, cq):
    """Slope replacing c in the region triple (a, b, c): a + b or a - b."""
    sp, sq = ap + bp, aq + bq
    if (sp == cp and sq == cq) or (sp == -cp and sq == -cq):
        sp, sq = ap - bp, aq - bq
    return sp, sq


@njit(cache=True)
def _search(x, y, z, max_depth, grow, stop, eps, max_nodes):
    """Returns (tag, kind, witness_p, witness_q, witness_trace, depth_used, nodes)."""
    cusp_x = abs(x - 2.0) <= CUSP_TOL or abs(x + 2.0) <= CUSP_TOL

    # root regions: A = 1/0, B = 0/1
    for idx in range(2):
        v = x if idx == 0 else y
        pv, qv = (1, 0) if idx == 0 else (0, 1)
        code = _reject_code(v, eps)
        if code != NO_WITNESS:
            return INDISCRETE, code, pv, qv, v, 0, 0
        if _near_parabolic(v, eps) and not (idx == 0 and cusp_x):
            return INDETERMINATE, PARABOLIC, pv, qv, v, 0, 0

    cap = 2 * max_depth + 8
    sa = np.empty(cap, dtype=np.complex128)
    sb = np.empty(cap, dtype=np.complex128)
    sc = np.empty(cap, dtype=np.complex128)
    sl = np.empty((cap, 6), dtype=np.int64)
    sd = np.empty(cap, dtype=np.int64)

    # both ends of the root edge AB: Tr AB (slope -1/1) and Tr A^-1 B (1/1);
    # the larger is pushed first so the smaller is explored first
    z2 = x * y - z
    big, bp0, small, sp0 = z, -1, z2, 1
    if abs(z2) > abs(z) or (abs(z2) == abs(z) and z2.real > z.real):
        big, bp0, small, sp0 = z2, 1, z, -1
    top = 0
    for step in range(2):
        sa[top] = x
        sb[top] = y
        sc[top] = big if step == 0 else small
        sl[top, 0], sl[top, 1] = 1, 0
        sl[top, 2], sl[top, 3] = 0, 1
        sl[top, 4] = bp0 if step == 0 else sp0
        sl[top, 5] = 1
        sd[top] = 1
        top += 1

    nodes = 0
    depth_used = 0
    while top > 0:
        top -= 1
        a, b, c = sa[top], sb[top], sc[top]
        ap, aq, bp, bq, cp, cq = sl[top, 0], sl[top, 1], sl[top, 2], sl[top, 3], sl[top, 4], sl[top, 5]
        d = sd[top]
        nodes += 1
        if d > depth_used:
            depth_used = d
        if not (np.isfinite(c.real) and np.isfinite(c.imag)):
            return INDETERMINATE, NUMERIC, cp, cq, c, depth_used, nodes

        code = _reject_code(c, eps)
        if code != NO_WITNESS:
            return INDISCRETE, code, cp, cq, c, depth_used, nodes
        if _near_parabolic(c, eps):
            return INDETERMINATE, PARABOLIC, cp, cq, c, depth_used, nodes

        aa, ab, ac = abs(a), abs(b), abs(c)
        if ac > grow and aa >= 2.0 and ab >= 2.0 and ac >= aa and ac >= ab:
            continue
        if ac > stop:
            continue
        if nodes >= max_nodes:
            return INDETERMINATE, NODES, cp, cq, c, depth_used, nodes

        a_cusp = cusp_x and ap == 1 and aq == 0
        b_cusp = cusp_x and bp == 1 and bq == 0
        c_cusp = cusp_x and cp == 1 and cq == 0

        # edge keeping (b, c), leaving a behind
        keep_bc = not (_region_certified(b, a, c, b_cusp, grow)
                       or _region_certified(c, a, b, c_cusp, grow))
        # edge keeping (a, c), leaving b behind
        keep_ac = not (_region_certified(a, b, c, a_cusp, grow)
                       or _region_certified(c, b, a, c_cusp, grow))
        if (keep_bc or keep_ac) and d >= max_depth:
            return INDETERMINATE, DEPTH, cp, cq, c, depth_used, nodes

        n_bc = b * c - a
        n_ac = a * c - b
        # push the larger child first so the smaller one is explored first
        order_bc_first = abs(n_bc) >= abs(n_ac)
        for step in range(2):
            use_bc = order_bc_first if step == 0 else not order_bc_first
            if use_bc:
                if not keep_bc:
                    continue
                np_, nq_ = _next_slope(bp, bq, cp, cq, ap, aq)
                sa[top], sb[top], sc[top] = b, c, n_bc
                sl[top, 0], sl[top, 1], sl[top, 2], sl[top, 3] = bp, bq, cp, cq
            else:
                if not keep_ac:
                    continue
                np_, nq_ = _next_slope(ap, aq, cp, cq, bp, bq)
                sa[top], sb[top], sc[top] = a, c, n_ac
                sl[top, 0], sl[top, 1], sl[top, 2], sl[top, 3] = ap, aq, cp, cq
            sl[top, 4], sl[top, 5] = np_, nq_
            sd[top] = d + 1
            top += 1

    return DISCRETE, NO_WITNESS, 0, 0, 0j, depth_used, nodes


def _slope_text(p: int, q: int) -> str:
    return str(FareySlope.from_vector(int(p), int(q)))


def bq_search(t: TraceTriple, budget: OracleBudget | None = None) -> OracleVerdict:
    """Classify the group with trace triple ``t``."""
    budget = budget or OracleBudget()
    tag, kind, wp, wq, wtr, depth, nodes = _search(
        complex(t.x), complex(t.y), complex(t.z),
        budget.max_depth, budget.grow_threshold, budget.stop_magnitude,
        budget.eps_real, budget.max_nodes,
    )
    witness = None
    if kind != NO_WITNESS:
        witness = Witness(_KIND_NAMES[kind], _slope_text(wp, wq), complex(wtr), int(depth))
    return OracleVerdict(_TAG_OF_CODE[int(tag)], witness, int(depth), int(nodes))


def classify_code(x: complex, y: complex, z: complex, budget: OracleBudget) -> int:
    """Bare verdict code for the renderer's inner loop."""
    return int(_search(x, y, z, budget.max_depth, budget.grow_threshold,
                       budget.stop_magnitude, budget.eps_real, budget.max_nodes)[0])


def probe(trA: complex, trB: complex, budget: OracleBudget | None = None,
          root: str = "plus") -> OracleVerdict:
    """Verdict at (Tr A, Tr B), taking Tr AB from the Fricke equation."""
    zp, zm = markov_third_trace(trA, trB)
    z = zm if root == "minus" else zp
    return bq_search(TraceTriple(trA, trB, z), budget)
