"""Group and torus homology with integral coefficient modules.

Pipeline: a coset table gives a Reidemeister-Schreier presentation of the
subgroup (Schreier generators on a BFS-minimal transversal, relators
rewritten coset by coset); Fox derivatives evaluated through a coefficient
module give the chain complex

    C_2 = Z^{rel} (x) V  --d2-->  C_1 = Z^{gen} (x) V  --d1-->  C_0 = V

and H_0 = coker d1, H_1 = ker d1 / im d2.  Since ker d1 is the kernel of an
integer matrix it is saturated in C_1, so the torsion of H_1 equals the
torsion of C_1 / im d2, i.e. the nontrivial invariant factors of d2; the
free rank comes from the exact ranks of d1 and d2.  (The same quantities
can be computed by saturating ker d1 with SNF transforms and re-running SNF
in the kernel basis; `h1_via_kernel_basis` keeps that slower route as a
cross-check oracle.)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field

from .congruence import CosetTable
from .matrices import Mat2, free_reduce
from .modules import IntegralModule
from .presentations import FinitePresentation
from .smith import SparseIntMatrix, exact_rank, smith_normal_form


# ---------------------------------------------------------------------------
# Torsion bookkeeping


def factorize(n: int, budget: int | None = None) -> dict:
    """Prime factorization of a positive integer (trial division + rho).

    ``budget`` caps the total number of rho iterations; exceeding it raises
    ArithmeticError so callers can fall back to factorization-free paths.
    """
    n = int(n)
    if n <= 0:
        raise ValueError("positive integers only")
    out = {}
    for p in range(2, 10000):
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    if n == 1:
        return out
    spent = [0]
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if _is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_rho(m, budget, spent)
        stack.append(d)
        stack.append(m // d)
    return out


def _is_prime(n):
    from .smith import _is_probable_prime

    return _is_probable_prime(n)


def _pollard_rho(n, budget=None, spent=None):
    import random

    if n % 2 == 0:
        return 2
    rng = random.Random(n)
    while True:
        x = rng.randrange(2, n)
        y, c, d = x, rng.randrange(1, n), 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
            if budget is not None:
                spent[0] += 1
                if spent[0] > budget:
                    raise ArithmeticError(f"factorization budget exhausted on {n}")
        if d != n:
            return d


@dataclass
class TorsionReport:
    free_rank: int
    torsion_order: int
    elementary_divisors: list
    provenance: dict = dataclass_field(default_factory=dict)

    @property
    def torsion_factored(self) -> dict:
        return factorize(self.torsion_order) if self.torsion_order > 1 else {}

    @property
    def log_torsion(self) -> float:
        total = 0.0
        for p, e in self.torsion_factored.items():
            total += e * math.log(p)
        return total

    def __repr__(self):
        tors = " x ".join(
            f"Z/{d}" for d in self.elementary_divisors if d > 1
        ) or "0"
        return f"TorsionReport(Z^{self.free_rank} + {tors})"


def _report(free_rank, divisors, provenance=None):
    divisors = [d for d in divisors if d > 1]
    order = 1
    for d in divisors:
        order *= d
    return TorsionReport(
        free_rank=free_rank,
        torsion_order=order,
        elementary_divisors=divisors,
        provenance=provenance or {},
    )


# ---------------------------------------------------------------------------
# Reidemeister-Schreier rewriting


class InconsistentTableError(ValueError):
    pass


def rewrite_subgroup(p: FinitePresentation, table: CosetTable) -> FinitePresentation:
    """Presentation of the index-n subgroup attached to the coset table."""
    for rel in p.relators:
        perm = table.permutation_of_word(rel)
        if any(perm[c] != c for c in range(table.index)):
            raise InconsistentTableError(f"relator {rel} does not act trivially")
    n = table.index
    ngens = p.ngens
    # tree edges: the discovering edge of each non-base coset
    tree = set()
    for dest in range(1, n):
        word = table.words[dest]
        k = word[-1] - 1
        parent = table.inverse_action[k][dest]
        tree.add((parent, k))
    sgen_index = {}
    sgen_names = []
    sgen_images = []
    for c in range(n):
        for k in range(ngens):
            if (c, k) in tree:
                continue
            sgen_index[(c, k)] = len(sgen_names)
            sgen_names.append(f"s{c}_{p.generator_names[k]}")
    # images: T(c) g_k T(c.g_k)^{-1}
    transversal = [table.transversal_matrix(c) for c in range(n)]
    for (c, k) in sorted(sgen_index, key=lambda ck: sgen_index[ck]):
        img = transversal[c] * p.images[k] * transversal[table.action[k][c]].inverse()
        sgen_images.append(img)

    def rewrite(c, word):
        out = []
        cur = c
        for letter in word:
            k = abs(letter) - 1
            if letter > 0:
                idx = sgen_index.get((cur, k))
                if idx is not None:
                    out.append(idx + 1)
                cur = table.action[k][cur]
            else:
                cur = table.inverse_action[k][cur]
                idx = sgen_index.get((cur, k))
                if idx is not None:
                    out.append(-(idx + 1))
        if cur != c:
            raise InconsistentTableError("relator does not fix its coset")
        return free_reduce(tuple(out))

    relators = []
    seen = set()
    for c in range(n):
        for rel in p.relators:
            w = rewrite(c, rel)
            if w and w not in seen:
                seen.add(w)
                relators.append(w)
    return FinitePresentation(
        generator_names=sgen_names,
        images=sgen_images,
        relators=relators,
        relator_signs=[],
        field=p.field,
    )


# ---------------------------------------------------------------------------
# Fox complexes


def fox_complex(p: FinitePresentation, mod: IntegralModule):
    """(d2, d1) with d1 d2 = 0: d1 stacks action(g) - 1, d2 holds the Fox
    derivative blocks of the relators."""
    r = mod.rank
    ngens = p.ngens
    actions = [mod.action(g) for g in p.images]
    inv_actions = [mod.action(g.inverse()) for g in p.images]
    d1 = SparseIntMatrix(r, ngens * r)
    for k, A in enumerate(actions):
        for i in range(r):
            for j in range(r):
                v = A[i][j] - (1 if i == j else 0)
                if v:
                    d1.set_entry(i, k * r + j, v)
    d2 = SparseIntMatrix(ngens * r, len(p.relators) * r)

    def matmul(A, B):
        n = len(A)
        return [
            [sum(A[i][l] * B[l][j] for l in range(n) if A[i][l]) for j in range(n)]
            for i in range(n)
        ]

    for ri, rel in enumerate(p.relators):
        # suffix-sided Fox derivative D(uv) = D(u) action(v) + D(v), so that
        # sum_k (action(g_k) - 1) D_k(r) = action(r) - 1 = 0 exactly;
        # scan right to left keeping cur = action of the current suffix.
        blocks = {}
        cur = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
        for letter in reversed(rel):
            k = abs(letter) - 1
            if letter > 0:
                blk = blocks.setdefault(k, [[0] * r for _ in range(r)])
                for i in range(r):
                    ci = cur[i]
                    bi = blk[i]
                    for j in range(r):
                        bi[j] += ci[j]
                cur = matmul(actions[k], cur)
            else:
                cur = matmul(inv_actions[k], cur)
                blk = blocks.setdefault(k, [[0] * r for _ in range(r)])
                for i in range(r):
                    ci = cur[i]
                    bi = blk[i]
                    for j in range(r):
                        bi[j] -= ci[j]
        for k, blk in blocks.items():
            for i in range(r):
                for j in range(r):
                    v = blk[i][j]
                    if v:
                        d2.set_entry(k * r + i, ri * r + j, v)
    return d2, d1


def complex_is_exact_at_composition(d2: SparseIntMatrix, d1: SparseIntMatrix) -> bool:
    return d1.matmul(d2).is_zero()


def group_homology(p: FinitePresentation, mod: IntegralModule, provenance=None):
    """(H_0, H_1) torsion reports for the presented group with module
    coefficients."""
    d2, d1 = fox_complex(p, mod)
    res1 = smith_normal_form(d1)
    h0 = _report(
        mod.rank - res1.rank, res1.invariant_factors, provenance=provenance
    )
    res2 = smith_normal_form(d2)
    free_rank = d1.ncols - res1.rank - res2.rank
    h1 = _report(free_rank, res2.invariant_factors, provenance=provenance)
    return h0, h1


def h1_via_kernel_basis(p: FinitePresentation, mod: IntegralModule):
    """Slow oracle: saturate ker d1 via SNF transforms, express im d2 in the
    kernel basis, and take SNF again (usable on small presentations)."""
    d2, d1 = fox_complex(p, mod)
    res = smith_normal_form(d1, want_transforms=True)
    n = d1.ncols
    rank = res.rank
    R = res.right
    # kernel basis = last n - rank columns of R
    # express d2 columns in that basis: y = R^{-1} d2 must vanish on the
    # first `rank` coordinates; R^{-1} = right-inverse tracked implicitly by
    # solving R y = col (R is unimodular; solve by dense elimination).
    Rd = R.to_dense()
    m = len(Rd)
    import fractions

    def solve(col):
        A = [
            [fractions.Fraction(x) for x in row] + [fractions.Fraction(col[i])]
            for i, row in enumerate(Rd)
        ]
        for c in range(m):
            piv = next(r for r in range(c, m) if A[r][c])
            A[c], A[piv] = A[piv], A[c]
            pv = A[c][c]
            A[c] = [x / pv for x in A[c]]
            for r2 in range(m):
                if r2 != c and A[r2][c]:
                    f = A[r2][c]
                    A[r2] = [x - f * y for x, y in zip(A[r2], A[c])]
        out = [A[i][m] for i in range(m)]
        assert all(x.denominator == 1 for x in out)
        return [int(x) for x in out]

    cols = []
    dense_d2 = d2.to_dense()
    for j in range(d2.ncols):
        col = [dense_d2[i][j] for i in range(d2.nrows)]
        y = solve(col)
        assert all(y[i] == 0 for i in range(rank)), "im d2 not inside ker d1"
        cols.append(y[rank:])
    if not cols:
        return _report(n - rank, [])
    Y = SparseIntMatrix.from_dense([list(row) for row in zip(*cols)])
    resY = smith_normal_form(Y)
    return _report((n - rank) - resY.rank, resY.invariant_factors)


# ---------------------------------------------------------------------------
# Torus complexes (rank-2 unipotent lattices)


@dataclass
class TorusComplexData:
    u1: Mat2
    u2: Mat2
    d2: SparseIntMatrix
    d1: SparseIntMatrix


def torus_complex(mod: IntegralModule, u1: Mat2, u2: Mat2) -> TorusComplexData:
    """Cell complex of the 2-torus with one 2-cell:
    d2(e2 (x) v) = e1_1 (x) (v - u2 v) + e1_2 (x) (u1 v - v),
    d1(e1_i (x) v) = e0 (x) (v - u_i v)."""
    if u1 * u2 != u2 * u1:
        raise ValueError("lattice generators must commute")
    for u in (u1, u2):
        if u.det() != 1 or u.trace() != 2:
            raise ValueError("lattice generators must be unipotent")
    r = mod.rank
    A1 = mod.action(u1)
    A2 = mod.action(u2)
    d2 = SparseIntMatrix(2 * r, r)
    d1 = SparseIntMatrix(r, 2 * r)
    for i in range(r):
        for j in range(r):
            e = int(i == j)
            v_top = e - A2[i][j]  # v - u2 v
            v_bot = A1[i][j] - e  # u1 v - v
            if v_top:
                d2.set_entry(i, j, v_top)
            if v_bot:
                d2.set_entry(r + i, j, v_bot)
            w1 = e - A1[i][j]
            w2 = e - A2[i][j]
            if w1:
                d1.set_entry(i, j, w1)
            if w2:
                d1.set_entry(i, r + j, w2)
    return TorusComplexData(u1=u1, u2=u2, d2=d2, d1=d1)


def torus_homology(mod: IntegralModule, u1: Mat2, u2: Mat2, provenance=None):
    """H_0, H_1, H_2 of the torus local system; exact."""
    data = torus_complex(mod, u1, u2)
    assert data.d1.matmul(data.d2).is_zero()
    r = mod.rank
    res1 = smith_normal_form(data.d1)
    res2 = smith_normal_form(data.d2)
    h0 = _report(r - res1.rank, res1.invariant_factors, provenance)
    h1 = _report(2 * r - res1.rank - res2.rank, res2.invariant_factors, provenance)
    # H_2 = ker d2: subgroup of a free module, so free
    h2 = _report(r - res2.rank, [], provenance)
    return h0, h1, h2


# ---------------------------------------------------------------------------
# Streaming H_0 bound machinery (normal-closure lattice)


def h0_upper_bound_lattice(mod: IntegralModule, unipotent_seeds, stabilizing):
    """HNF basis of the smallest lattice containing (action(s) - 1) V for the
    seed matrices and stable under the stabilizing matrices.

    For seeds inside a normal subgroup H and stabilizers generating the
    ambient group, the result is contained in the augmentation sublattice
    (H - 1)V, so |V / L| upper-bounds |H_0(H; V)|.
    """
    from .smith import row_hnf, solve_upper_unimodular

    r = mod.rank
    rows = []
    for s in unipotent_seeds:
        A = mod.action(s)
        for j in range(r):
            col = [A[i][j] - int(i == j) for i in range(r)]
            if any(col):
                rows.append(col)
    basis = row_hnf(rows)
    stab_actions = [mod.action(g) for g in stabilizing]
    changed = True
    while changed:
        changed = False
        for A in stab_actions:
            new_rows = []
            for vec in basis:
                img = [sum(A[i][j] * vec[j] for j in range(r)) for i in range(r)]
                if solve_upper_unimodular(basis, img) is None:
                    new_rows.append(img)
            if new_rows:
                basis = row_hnf(basis + new_rows)
                changed = True
    return basis


def lattice_quotient_report(rank: int, basis_rows, provenance=None) -> TorsionReport:
    if not basis_rows:
        return _report(rank, [], provenance)
    res = smith_normal_form(SparseIntMatrix.from_dense(basis_rows))
    return _report(rank - res.rank, res.invariant_factors, provenance)
