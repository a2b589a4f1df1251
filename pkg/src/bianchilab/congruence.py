"""Finite quotients SL_2(O/I), congruence level structures, coset tables,
indices, and torsion-freeness certification.

Levels come in the three standard flavors

    principal Gamma(I):  b, c in I and a, d in 1 + I
    semi      Gamma_1(I): c in I and a, d in 1 + I
    hecke     Gamma_0(I): c in I

and a level's subgroup index in SL_2(O_F) equals the index of its defining
congruence condition inside SL_2(O/I) (strong approximation: the reduction
map is onto).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .field import (
    FieldElement,
    IdealLattice,
    QuadraticField,
    euler_phi_ideal,
    factor_ideal,
    ideal_from_generators,
    unit_ideal,
)
from .matrices import Mat2
from .presentations import FinitePresentation

PRINCIPAL = "principal"
HECKE = "hecke"
SEMI = "semi"
FLAVORS = (PRINCIPAL, HECKE, SEMI)

DEFAULT_NORM_BOUND = 10**4
DEFAULT_ORDER_BOUND = 2 * 10**6


class QuotientTooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class LevelStructure:
    ideal: IdealLattice
    flavor: str

    def __post_init__(self):
        if self.flavor not in FLAVORS:
            raise ValueError(f"unknown flavor {self.flavor!r}; use one of {FLAVORS}")

    @property
    def field(self):
        return self.ideal.field

    def contains(self, g: Mat2) -> bool:
        """Membership of an SL_2(O_F) matrix in the level subgroup."""
        I = self.ideal
        a, b, c, d = g.m
        if not I.contains(c):
            return False
        if self.flavor == HECKE:
            return True
        one = self.field.one
        if not (I.contains(a - one) and I.contains(d - one)):
            return False
        if self.flavor == SEMI:
            return True
        return I.contains(b)

    def contains_minus_identity(self) -> bool:
        F = self.field
        mid = -Mat2.identity(F)
        return self.contains(mid)

    def cache_key(self):
        return (self.field.disc, self.ideal.hnf, self.flavor)

    def __repr__(self):
        return f"Level({self.flavor}, {self.ideal})"


def sl2_order_formula(field: QuadraticField, ideal: IdealLattice) -> int:
    """|SL_2(O/I)| = N(I)^3 * prod_{p | I} (1 - N(p)^-2)."""
    if ideal.norm == 1:
        return 1
    val = Fraction(ideal.norm) ** 3
    for pr, _k in factor_ideal(field, ideal):
        val *= 1 - Fraction(1, pr.norm**2)
    assert val.denominator == 1
    return int(val)


def p1_size_formula(field: QuadraticField, ideal: IdealLattice) -> int:
    """|P^1(O/I)| = N(I) * prod_{p | I} (1 + 1/N(p))."""
    if ideal.norm == 1:
        return 1
    val = Fraction(ideal.norm)
    for pr, _k in factor_ideal(field, ideal):
        val *= 1 + Fraction(1, pr.norm)
    assert val.denominator == 1
    return int(val)


def subgroup_index(field: QuadraticField, level: LevelStructure) -> int:
    """[SL_2(O_F) : Gamma_level]."""
    I = level.ideal
    if level.flavor == PRINCIPAL:
        return sl2_order_formula(field, I)
    if level.flavor == HECKE:
        return p1_size_formula(field, I)
    # semi: index = |SL_2(O/I)| / #upper unipotents = order / N(I)
    order = sl2_order_formula(field, I)
    assert order % I.norm == 0
    return order // I.norm


def check_index_level(field: QuadraticField, level: LevelStructure) -> bool:
    """index >= (1/3) * N(I)^{1/3}, checked in exact integer arithmetic."""
    idx = subgroup_index(field, level)
    return 27 * idx**3 >= level.ideal.norm


# ---------------------------------------------------------------------------
# The finite group SL_2(O/I)


class FiniteQuotient:
    """SL_2(O/I) with elements enumerated by closure from generator images."""

    def __init__(self, field, ideal, elements, ring):
        self.field = field
        self.ideal = ideal
        self.elements = elements
        self.ring = ring

    @property
    def order(self):
        return len(self.elements)

    def reduce(self, g: Mat2) -> tuple:
        red = self.ring.reduce
        a, b, c, d = g.m
        return (red(a), red(b), red(c), red(d))

    def mul(self, x: tuple, y: tuple) -> tuple:
        red = self.ring.reduce
        a, b, c, d = x
        e, f, g, h = y
        return (
            red(a * e + b * g),
            red(a * f + b * h),
            red(c * e + d * g),
            red(c * f + d * h),
        )


def sl2_quotient(
    field: QuadraticField,
    ideal: IdealLattice,
    norm_bound: int = DEFAULT_NORM_BOUND,
    order_bound: int = DEFAULT_ORDER_BOUND,
) -> FiniteQuotient:
    """Enumerate SL_2(O/I) by BFS closure from the elementary generators."""
    if ideal.norm > norm_bound:
        raise QuotientTooLargeError(
            f"norm {ideal.norm} exceeds the configured bound {norm_bound}"
        )
    expected = sl2_order_formula(field, ideal)
    if expected > order_bound:
        raise QuotientTooLargeError(
            f"|SL_2(O/I)| = {expected} exceeds the configured bound {order_bound}"
        )
    ring = ideal.residue_ring()
    one, zero, w = field.one, field.zero, field.omega
    gens = [
        Mat2(zero, -one, one, zero),
        Mat2(one, one, zero, one),
        Mat2(one, w, zero, one),
    ]
    quo = FiniteQuotient(field, ideal, [], ring)
    gen_imgs = [quo.reduce(g) for g in gens]
    start = quo.reduce(Mat2.identity(field))
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gen_imgs:
                y = quo.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    quo.elements = sorted(seen, key=lambda t: tuple((e.a, e.b) for e in t))
    if quo.order != expected:
        raise AssertionError(
            f"BFS closure found {quo.order} elements, formula says {expected}"
        )
    return quo


def count_sl2_exhaustive(field: QuadraticField, ideal: IdealLattice) -> int:
    """#{(a,b,c,d) in (O/I)^4 : ad - bc = 1} by vectorized enumeration.

    Counts every matrix (no group theory involved), so it is an independent
    check of the order formula and of the BFS closure.
    """
    import numpy as np

    a_, b_, c_ = ideal.a, ideal.b, ideal.c
    n = ideal.norm
    t, nn = field.omega_t, field.omega_n
    idx = np.arange(n, dtype=np.int64)
    x = idx // c_
    y = idx % c_

    def reduce_xy(u, v):
        m = np.floor_divide(u, a_)
        u2 = u - m * a_
        v2 = np.mod(v - m * b_, c_)
        return u2, v2

    def encode(u, v):
        return u * c_ + v

    # multiplication table on encodings
    X1 = x[:, None]
    Y1 = y[:, None]
    X2 = x[None, :]
    Y2 = y[None, :]
    u = X1 * X2 + Y1 * Y2 * nn
    v = X1 * Y2 + Y1 * X2 + Y1 * Y2 * t
    u, v = reduce_xy(u, v)
    table = encode(u, v)
    cnt = np.bincount(table.ravel(), minlength=n)
    # encoding of w - 1 for each w
    uu, vv = reduce_xy(x - 1, y)
    minus1 = encode(uu, vv)
    total = int((cnt.astype(object) * cnt[minus1].astype(object)).sum())
    return total


# ---------------------------------------------------------------------------
# Coset tables


class CosetTable:
    """Right action of the presentation generators on cosets of a level.

    Coset 0 is the subgroup itself; ``action[k]`` is the permutation of the
    k-th generator, ``inverse_action[k]`` its inverse.  ``words`` holds a
    BFS-minimal transversal word (signed generator indices) per coset.
    """

    def __init__(self, presentation, level, index, action, inverse_action, words, quotient_ctx):
        self.presentation = presentation
        self.level = level
        self.index = index
        self.action = action
        self.inverse_action = inverse_action
        self.words = words
        self._ctx = quotient_ctx

    @property
    def ngens(self):
        return len(self.action)

    def apply_letter(self, coset: int, letter: int) -> int:
        if letter > 0:
            return self.action[letter - 1][coset]
        return self.inverse_action[-letter - 1][coset]

    def apply_word(self, coset: int, word) -> int:
        for letter in word:
            coset = self.apply_letter(coset, letter)
        return coset

    def permutation_of_word(self, word):
        return [self.apply_word(c, word) for c in range(self.index)]

    def permutation_of_matrix(self, g: Mat2):
        """Permutation induced by an arbitrary element of SL_2(O_F)."""
        return self._ctx.permutation_of_matrix(g)

    def transversal_matrix(self, coset: int) -> Mat2:
        return self.presentation.evaluate(self.words[coset])

    def is_transitive(self):
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for c in frontier:
                for perm in list(self.action) + list(self.inverse_action):
                    d = perm[c]
                    if d not in seen:
                        seen.add(d)
                        nxt.append(d)
            frontier = nxt
        return len(seen) == self.index

    def fixed_points_of_matrix(self, g: Mat2) -> int:
        perm = self.permutation_of_matrix(g)
        return sum(1 for c, image in enumerate(perm) if c == image)


class _CosetContext:
    """Canonical coset labels for the three flavors, over the residue ring."""

    def __init__(self, field, level):
        self.field = field
        self.level = level
        self.ring = level.ideal.residue_ring()
        self.flavor = level.flavor
        if self.flavor == HECKE:
            self.units = self.ring.unit_group()
        self.label_to_index = {}
        self.labels = []

    def _key(self, elems):
        return tuple((e.a, e.b) for e in elems)

    def start_label(self):
        red = self.ring.reduce
        F = self.field
        if self.flavor == PRINCIPAL:
            return self._key(
                (red(F.one), red(F.zero), red(F.zero), red(F.one))
            )
        return self.row_label(red(F.zero), red(F.one))

    def row_label(self, c, d):
        if self.flavor == SEMI:
            return self._key((c, d))
        # hecke: scale by units, take the lexicographically least key
        red = self.ring.reduce
        best = None
        for un in self.units:
            key = self._key((red(un * c), red(un * d)))
            if best is None or key < best:
                best = key
        return best

    def act(self, label, gmat):
        """Right multiplication on the canonical label."""
        red = self.ring.reduce
        F = self.field
        e, f, g, h = gmat
        if self.flavor == PRINCIPAL:
            a = F.element(*label[0])
            b = F.element(*label[1])
            c = F.element(*label[2])
            d = F.element(*label[3])
            return self._key(
                (
                    red(a * e + b * g),
                    red(a * f + b * h),
                    red(c * e + d * g),
                    red(c * f + d * h),
                )
            )
        c = F.element(*label[0])
        d = F.element(*label[1])
        nc = red(c * e + d * g)
        nd = red(c * f + d * h)
        if self.flavor == SEMI:
            return self._key((nc, nd))
        return self.row_label(nc, nd)

    def permutation_of_matrix(self, gm: Mat2):
        red = self.ring.reduce
        g = tuple(red(x) for x in gm.m)
        return [self.label_to_index[self.act(self.labels[c], g)] for c in range(len(self.labels))]


def coset_table(presentation: FinitePresentation, level: LevelStructure) -> CosetTable:
    """BFS construction of the permutation action on cosets of the level."""
    field = presentation.field
    if field != level.field:
        raise ValueError("presentation and level live over different fields")
    expected = subgroup_index(field, level)
    ctx = _CosetContext(field, level)
    red = ctx.ring.reduce
    gen_imgs = [tuple(red(x) for x in g.m) for g in presentation.images]
    inv_imgs = [tuple(red(x) for x in g.inverse().m) for g in presentation.images]
    start = ctx.start_label()
    ctx.label_to_index[start] = 0
    ctx.labels.append(start)
    words = [()]
    frontier = [0]
    edges = {}
    while frontier:
        nxt = []
        for c in frontier:
            label = ctx.labels[c]
            for k, g in enumerate(gen_imgs):
                dest_label = ctx.act(label, g)
                dest = ctx.label_to_index.get(dest_label)
                if dest is None:
                    dest = len(ctx.labels)
                    ctx.label_to_index[dest_label] = dest
                    ctx.labels.append(dest_label)
                    words.append(words[c] + (k + 1,))
                    nxt.append(dest)
                edges[(c, k)] = dest
        frontier = nxt
    index = len(ctx.labels)
    if index != expected:
        raise AssertionError(
            f"generator images reached {index} cosets; strong approximation "
            f"predicts {expected} (presentation bug?)"
        )
    action = []
    inverse_action = []
    for k in range(len(gen_imgs)):
        perm = [edges[(c, k)] for c in range(index)]
        action.append(perm)
        inv = [0] * index
        for c, d in enumerate(perm):
            inv[d] = c
        inverse_action.append(inv)
    table = CosetTable(presentation, level, index, action, inverse_action, words, ctx)
    for rel in presentation.relators:
        perm = table.permutation_of_word(rel)
        if any(perm[c] != c for c in range(index)):
            raise AssertionError(f"relator {rel} does not act trivially")
    return table


# ---------------------------------------------------------------------------
# Torsion-freeness


@dataclass
class TorsionVerdict:
    status: str  # "certified-free" | "has-torsion" | "unknown"
    witness: Mat2 | None = None
    reason: str = ""

    def __bool__(self):
        return self.status == "certified-free"


def _small_ideal_elements(ideal: IdealLattice, count: int = 60):
    """Nonzero elements of the ideal with small coordinates."""
    F = ideal.field
    out = []
    span = 4
    g1 = F.element(ideal.a, ideal.b)
    g2 = F.element(0, ideal.c)
    for m in range(-span, span + 1):
        for n in range(-span, span + 1):
            x = m * g1 + n * g2
            out.append(x)
    out.sort(key=lambda x: (x.norm(), x.a, x.b))
    return out[: count + 1]


def is_torsion_free(field: QuadraticField, level: LevelStructure) -> TorsionVerdict:
    """Three-valued verdict.

    Noncentral finite-order elements of SL_2(O_F) have trace in {0, 1, -1},
    so torsion in the level subgroup requires either -1 itself or an element
    of one of those traces; each flavor's congruence conditions restrict the
    achievable traces, and witnesses are produced by direct construction.
    """
    I = level.ideal
    if I.norm == 1:
        S = Mat2(field.zero, -field.one, field.one, field.zero)
        return TorsionVerdict("has-torsion", S, "full group: S has order 4")
    if level.contains_minus_identity():
        return TorsionVerdict("has-torsion", -Mat2.identity(field), "-1 lies in the subgroup")

    traces = (0, 1, -1)
    ring = I.residue_ring() if I.norm <= 20000 else None

    if level.flavor == HECKE:
        # unreachable in practice: -1 is always in Gamma_0; kept for safety
        for t in traces:
            if ring is None:
                break
            for r in ring.representatives:
                val = r * r - t * r + field.one
                if I.contains(val):
                    c = r * (field.element(t) - r) - field.one
                    g = Mat2(r, field.one, c, field.element(t) - r)
                    assert g.det() == 1 and level.contains(g)
                    return TorsionVerdict("has-torsion", g, f"trace {t} element")
        return TorsionVerdict("unknown", None, "no witness found")

    if level.flavor == SEMI:
        hits = [t for t in traces if I.contains(field.element(t - 2))]
        if not hits:
            return TorsionVerdict(
                "certified-free",
                None,
                "traces 0, +-1 are incompatible with a, d = 1 mod I",
            )
        t = hits[0]
        a = field.one
        d = field.element(t - 1)
        g = Mat2(a, field.one, a * d - field.one, d)
        assert g.det() == 1 and level.contains(g)
        return TorsionVerdict("has-torsion", g, f"trace {t} element")

    # principal: an element = 1 mod I of trace t has det(g - 1) = 2 - t in I^2
    I2 = I * I
    hits = [t for t in traces if I2.contains(field.element(2 - t))]
    if not hits:
        return TorsionVerdict(
            "certified-free",
            None,
            "det(g-1) = 2 - t lands in I^2 for no admissible trace",
        )
    smalls = _small_ideal_elements(I)
    for t in hits:
        tm2 = field.element(t - 2)
        for delta in smalls + [field.zero]:
            alpha = tm2 - delta
            if not I.contains(alpha):
                continue
            need = alpha + delta + alpha * delta
            for beta in smalls:
                if beta.is_zero():
                    continue
                q, r = need.divmod(beta)
                if not r.is_zero():
                    continue
                if not I.contains(q):
                    continue
                g = Mat2(field.one + alpha, beta, q, field.one + delta)
                if g.det() == 1 and g.trace() == t and level.contains(g):
                    return TorsionVerdict("has-torsion", g, f"trace {t} element")
            if need.is_zero():
                g = Mat2(field.one + alpha, field.zero, field.zero, field.one + delta)
                if g.det() == 1 and level.contains(g):
                    return TorsionVerdict("has-torsion", g, f"trace {t} element")
    return TorsionVerdict("unknown", None, "trace condition met but no witness found")


def intersect_levels(l1: LevelStructure, l2: LevelStructure):
    """Membership predicate of the intersection of two levels."""
    def member(g: Mat2) -> bool:
        return l1.contains(g) and l2.contains(g)

    return member
