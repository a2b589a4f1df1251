"""Integral coefficient modules V_Z for Sym^{n1}(std) (x) Sym^{n2}(conj std).

The module is an O_F-lattice on the monomial basis with scalars restricted
to Z via the basis (1, omega), so the Z-rank is 2(n1+1)(n2+1) and every
group element acts by an exact integer matrix of determinant +-1.  A rank-1
trivial-Z variant backs classical H_1(Gamma; Z) computations.

The invariant pairing is the determinant form on each symmetric power,
taken across the scalar layer by the unimodular trace form
x, y -> omega-coordinate of x*y (i.e. Tr(x y / sqrt(disc))), so the dual
lattice V_Z' differs from V_Z only through the n1! n2! denominators of the
symmetric-power form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .field import FieldElement, QuadraticField
from .matrices import Mat2
from .smith import SparseIntMatrix, kernel_basis, row_hnf, smith_normal_form

DEFAULT_DEGREE_BOUND = 6


@dataclass(frozen=True)
class WeightPair:
    n1: int
    n2: int

    def __post_init__(self):
        if self.n1 < 0 or self.n2 < 0:
            raise ValueError("weights must be nonnegative")

    @property
    def strongly_acyclic(self) -> bool:
        return self.n1 != self.n2

    def __repr__(self):
        return f"({self.n1},{self.n2})"


class DegreeBoundError(ValueError):
    pass


def _binomial_matrix(n: int, g: Mat2):
    """Substitution matrix of g on Sym^n(std) over O_F (column action)."""
    F = g.field
    a, b, c, d = g.m
    # precompute powers
    def powers(x):
        out = [F.one]
        for _ in range(n):
            out.append(out[-1] * x)
        return out

    pa, pb, pc, pd = powers(a), powers(b), powers(c), powers(d)
    cols = []
    for k in range(n + 1):
        col = [F.zero for _ in range(n + 1)]
        for i in range(k + 1):
            for j2 in range(n - k + 1):
                j = i + j2
                coeff = math.comb(k, i) * math.comb(n - k, j2)
                term = pa[i] * pc[k - i] * pb[j2] * pd[n - k - j2]
                col[j] = col[j] + coeff * term
        cols.append(col)
    # rows x cols
    return [[cols[k][j] for k in range(n + 1)] for j in range(n + 1)]


def _scalar_block(x: FieldElement):
    """Multiplication by x on the Z-basis (1, omega)."""
    t, n = x.field.omega_t, x.field.omega_n
    u, v = x.a, x.b
    return ((u, v * n), (v, u + v * t))


class IntegralModule:
    """Gamma-stable Z-lattice with exact action matrices."""

    def __init__(self, field: QuadraticField, weight: WeightPair | None, kind="restricted"):
        self.field = field
        self.weight = weight
        self.kind = kind
        if kind == "trivial-z":
            self.rank = 1
            self.basis_labels = ["1"]
        else:
            n1, n2 = weight.n1, weight.n2
            self.rank = 2 * (n1 + 1) * (n2 + 1)
            self.basis_labels = [
                f"e1^{a}e2^{n1-a}*f1^{b}f2^{n2-b}*w^{w}"
                for a in range(n1 + 1)
                for b in range(n2 + 1)
                for w in (0, 1)
            ]
        self._cache = {}

    def __repr__(self):
        if self.kind == "trivial-z":
            return f"IntegralModule(trivial-Z, d={self.field.d})"
        return f"IntegralModule({self.weight}, d={self.field.d}, rank={self.rank})"

    def lattice_tag(self) -> str:
        if self.kind == "trivial-z":
            return "trivial-Z"
        return f"monomial-O_F-restricted({self.weight.n1},{self.weight.n2})"

    def action(self, g: Mat2):
        """Exact integer action matrix (list of rows)."""
        key = g.to_pairs()
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if self.kind == "trivial-z":
            mat = [[1]]
            self._cache[key] = mat
            return mat
        n1, n2 = self.weight.n1, self.weight.n2
        P = _binomial_matrix(n1, g)
        Q = _binomial_matrix(n2, g.conjugate_entries())
        k1, k2 = n1 + 1, n2 + 1
        r = self.rank
        mat = [[0] * r for _ in range(r)]
        for a1 in range(k1):
            for b1 in range(k2):
                for a2 in range(k1):
                    for b2 in range(k2):
                        x = P[a1][a2] * Q[b1][b2]
                        if x.is_zero():
                            continue
                        blk = _scalar_block(x)
                        ri = (a1 * k2 + b1) * 2
                        ci = (a2 * k2 + b2) * 2
                        mat[ri][ci] = blk[0][0]
                        mat[ri][ci + 1] = blk[0][1]
                        mat[ri + 1][ci] = blk[1][0]
                        mat[ri + 1][ci + 1] = blk[1][1]
        if len(self._cache) < 4096:
            self._cache[key] = mat
        return mat

    def action_sparse(self, g: Mat2) -> SparseIntMatrix:
        return SparseIntMatrix.from_dense(self.action(g))


def build_module(
    field: QuadraticField, w: WeightPair, degree_bound: int = DEFAULT_DEGREE_BOUND
) -> IntegralModule:
    if w.n1 + w.n2 > degree_bound:
        raise DegreeBoundError(
            f"total weight {w.n1 + w.n2} exceeds the degree bound {degree_bound}"
        )
    return IntegralModule(field, w)


def trivial_module(field: QuadraticField) -> IntegralModule:
    return IntegralModule(field, None, kind="trivial-z")


# ---------------------------------------------------------------------------
# Determinant pairing and dual lattice


def _sym_pairing(n: int):
    """Gram of the determinant form on Sym^n: <e1^j e2^(n-j), e1^k e2^(n-k)>
    = (-1)^(n-j) / C(n, j) when j + k = n, else 0."""
    S = [[Fraction(0)] * (n + 1) for _ in range(n + 1)]
    for j in range(n + 1):
        S[j][n - j] = Fraction((-1) ** (n - j), math.comb(n, j))
    return S


@dataclass
class PairingData:
    gram: list  # rank x rank Fractions
    dual_denominator: int
    dual_basis: list  # rows: integer coordinates; lattice = rows / denominator

    def dual_lattice_hnf(self):
        return self.dual_basis


def _matmul_frac(A, B):
    n, k, m = len(A), len(B), len(B[0])
    out = [[Fraction(0)] * m for _ in range(n)]
    for i in range(n):
        for j in range(m):
            s = Fraction(0)
            for l in range(k):
                if A[i][l] and B[l][j]:
                    s += A[i][l] * B[l][j]
            out[i][j] = s
    return out


def _invert_frac(G):
    n = len(G)
    A = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(G)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col]), None)
        if piv is None:
            raise ValueError("singular gram matrix")
        A[col], A[piv] = A[piv], A[col]
        pv = A[col][col]
        A[col] = [x / pv for x in A[col]]
        for r in range(n):
            if r != col and A[r][col]:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [row[n:] for row in A]


def pairing(m: IntegralModule) -> PairingData:
    """Gram matrix of the invariant form and the dual lattice V_Z'."""
    if m.kind == "trivial-z":
        return PairingData(gram=[[Fraction(1)]], dual_denominator=1, dual_basis=[[1]])
    n1, n2 = m.weight.n1, m.weight.n2
    S1, S2 = _sym_pairing(n1), _sym_pairing(n2)
    t = m.field.omega_t
    # scalar layer: omega-coordinate of w^(p+q): [[0, 1], [1, t]]
    layer = ((Fraction(0), Fraction(1)), (Fraction(1), Fraction(t)))
    k1, k2 = n1 + 1, n2 + 1
    r = m.rank
    G = [[Fraction(0)] * r for _ in range(r)]
    for a1 in range(k1):
        for b1 in range(k2):
            for a2 in range(k1):
                for b2 in range(k2):
                    base = S1[a1][a2] * S2[b1][b2]
                    if not base:
                        continue
                    i = (a1 * k2 + b1) * 2
                    j = (a2 * k2 + b2) * 2
                    for w1 in (0, 1):
                        for w2 in (0, 1):
                            G[i + w1][j + w2] = base * layer[w1][w2]
    Ginv = _invert_frac(G)
    den = 1
    for row in Ginv:
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
    W = [[int(x * den) for x in row] for row in Ginv]
    # dual lattice = column span of Ginv = row span of its transpose
    Wt = [[W[i][j] for i in range(r)] for j in range(r)]
    basis = row_hnf(Wt)
    return PairingData(gram=G, dual_denominator=den, dual_basis=basis)


def gram_is_invariant(m: IntegralModule, pd: PairingData, g: Mat2) -> bool:
    """action(g)^T * G * action(g) == G, exactly."""
    A = m.action(g)
    G = pd.gram
    r = m.rank
    At = [[Fraction(A[j][i]) for j in range(r)] for i in range(r)]
    AG = _matmul_frac(At, G)
    AGA = _matmul_frac(AG, [[Fraction(x) for x in row] for row in A])
    return AGA == G


def dual_of_lattice(pd: PairingData, basis_rows, denominator: int):
    """Dual of the lattice spanned by basis_rows/denominator under pd.gram,
    returned as (rows, denominator) in HNF."""
    G = pd.gram
    r = len(G)
    B = [[Fraction(v, denominator) for v in row] for row in basis_rows]
    M = _matmul_frac(B, G)  # rows: gram-paired coordinates of basis vectors
    Minv = _invert_frac(M)
    den = 1
    for row in Minv:
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
    W = [[int(x * den) for x in row] for row in Minv]
    Wt = [[W[i][j] for i in range(r)] for j in range(r)]
    return row_hnf(Wt), den


def dual_is_self_dual(m: IntegralModule, pd: PairingData) -> bool:
    """(V_Z')' == V_Z as lattices."""
    rows, den = dual_of_lattice(pd, pd.dual_basis, pd.dual_denominator)
    ident = [[den if i == j else 0 for j in range(m.rank)] for i in range(m.rank)]
    return row_hnf(rows) == row_hnf(ident)


# ---------------------------------------------------------------------------
# Unipotent invariants


def is_unipotent(g: Mat2) -> bool:
    return g.trace() == 2 and g.det() == 1 and not g.is_identity()


def unipotent_invariants(m: IntegralModule, u: Mat2):
    """Saturated invariant sublattice ker(action(u) - 1), as basis rows."""
    if not (u.is_identity() or is_unipotent(u)):
        raise ValueError("input must be unipotent or the identity")
    if u.is_identity():
        return [[int(i == j) for j in range(m.rank)] for i in range(m.rank)]
    A = m.action(u)
    r = m.rank
    for i in range(r):
        A = [row[:] for row in A] if i == 0 else A
    B = [[A[i][j] - int(i == j) for j in range(r)] for i in range(r)]
    basis = kernel_basis(B)
    return row_hnf(basis) if basis else []


def saturation_is_trivial(m: IntegralModule, sublattice_rows) -> bool:
    """The quotient by the sublattice is torsion-free (all factors 1)."""
    if not sublattice_rows:
        return True
    res = smith_normal_form(SparseIntMatrix.from_dense(sublattice_rows))
    return all(d == 1 for d in res.invariant_factors)


def sgoc_constant(w: WeightPair) -> int:
    """Product of the binomial coefficients of both symmetric factors."""
    N = 1
    for k in range(w.n1 + 1):
        N *= math.comb(w.n1, k)
    for k in range(w.n2 + 1):
        N *= math.comb(w.n2, k)
    return N


def det_is_unit(m: IntegralModule, g: Mat2) -> bool:
    A = SparseIntMatrix.from_dense(m.action(g))
    res = smith_normal_form(A)
    return all(d == 1 for d in res.invariant_factors)
