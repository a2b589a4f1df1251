"""Exact sparse integer linear algebra: Smith normal form, ranks, kernels, HNF.

The SNF driver eliminates with unimodular row/column operations only, picking
pivots by Markowitz cost with a strong preference for unit entries (no entry
growth at a unit pivot).  Diagonal entries are collected during elimination
and the divisibility chain is repaired afterwards by gcd/lcm passes, which
yields the same invariant factors.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field as dataclass_field


class SparseIntMatrix:
    """COO-ish integer matrix: dict-of-rows, no explicit zeros."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, entries=None):
        self.nrows = nrows
        self.ncols = ncols
        self.rows = {}
        if entries:
            for (i, j, v) in entries:
                self.add_entry(i, j, v)

    def add_entry(self, i, j, v):
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError((i, j))
        if v == 0:
            return
        row = self.rows.setdefault(i, {})
        nv = row.get(j, 0) + int(v)
        if nv:
            row[j] = nv
        else:
            del row[j]
            if not row:
                del self.rows[i]

    def set_entry(self, i, j, v):
        if v == 0:
            row = self.rows.get(i)
            if row and j in row:
                del row[j]
                if not row:
                    del self.rows[i]
            return
        self.rows.setdefault(i, {})[j] = int(v)

    def get(self, i, j):
        return self.rows.get(i, {}).get(j, 0)

    @property
    def nnz(self):
        return sum(len(r) for r in self.rows.values())

    def entries(self):
        for i, row in self.rows.items():
            for j, v in row.items():
                yield (i, j, v)

    def copy(self):
        m = SparseIntMatrix(self.nrows, self.ncols)
        m.rows = {i: dict(r) for i, r in self.rows.items()}
        return m

    def transpose(self):
        m = SparseIntMatrix(self.ncols, self.nrows)
        for (i, j, v) in self.entries():
            m.set_entry(j, i, v)
        return m

    def to_dense(self):
        d = [[0] * self.ncols for _ in range(self.nrows)]
        for (i, j, v) in self.entries():
            d[i][j] = v
        return d

    @staticmethod
    def from_dense(d):
        m = SparseIntMatrix(len(d), len(d[0]) if d else 0)
        for i, row in enumerate(d):
            for j, v in enumerate(row):
                if v:
                    m.set_entry(i, j, v)
        return m

    def matmul(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        out = SparseIntMatrix(self.nrows, other.ncols)
        for i, row in self.rows.items():
            acc = {}
            for k, v in row.items():
                orow = other.rows.get(k)
                if not orow:
                    continue
                for j, w in orow.items():
                    acc[j] = acc.get(j, 0) + v * w
            for j, w in acc.items():
                if w:
                    out.set_entry(i, j, w)
        return out

    def is_zero(self):
        return not self.rows

    def __repr__(self):
        return f"SparseIntMatrix({self.nrows}x{self.ncols}, nnz={self.nnz})"

    # -- coordinate text interchange -------------------------------------
    def to_coordinate_text(self) -> str:
        lines = [f"{self.nrows} {self.ncols} {self.nnz}"]
        for (i, j, v) in sorted(self.entries()):
            lines.append(f"{i} {j} {v}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_coordinate_text(text: str) -> "SparseIntMatrix":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        nr, nc, nnz = (int(x) for x in lines[0].split())
        m = SparseIntMatrix(nr, nc)
        for ln in lines[1:]:
            i, j, v = ln.split()
            m.set_entry(int(i), int(j), int(v))
        if m.nnz != nnz:
            raise ValueError("nnz header mismatch")
        return m


@dataclass
class SnfResult:
    invariant_factors: list
    rank: int
    left: "SparseIntMatrix | None" = None
    right: "SparseIntMatrix | None" = None
    modular_checked: bool = dataclass_field(default=False)

    @property
    def torsion_factors(self):
        return [d for d in self.invariant_factors if d > 1]

    @property
    def torsion_order(self):
        t = 1
        for d in self.torsion_factors:
            t *= d
        return t


def _fix_divisibility(diag):
    ones = sum(1 for d in diag if d in (1, -1))
    rest = [abs(d) for d in diag if d and d not in (1, -1)]
    changed = True
    while changed:
        changed = False
        for i in range(len(rest)):
            for j in range(i + 1, len(rest)):
                if rest[j] % rest[i]:
                    g = math.gcd(rest[i], rest[j])
                    l = rest[i] // g * rest[j]
                    rest[i], rest[j] = g, l
                    changed = True
        rest = [d for d in rest if d != 1] + [1] * sum(1 for d in rest if d == 1)
        ones += sum(1 for d in rest if d == 1)
        rest = [d for d in rest if d != 1]
    return [1] * ones + sorted(rest)


class _Eliminator:
    """Shared sparse elimination state with optional transform tracking."""

    def __init__(self, A: SparseIntMatrix, track_left=False, track_right=False):
        import heapq

        self.nrows, self.ncols = A.nrows, A.ncols
        self.rows = {i: dict(r) for i, r in A.rows.items()}
        self.cols = {}
        for i, row in self.rows.items():
            for j in row:
                self.cols.setdefault(j, set()).add(i)
        self.L = None
        self.R = None
        if track_left:
            self.L = {i: {i: 1} for i in range(self.nrows)}
        if track_right:
            # track columns of R as rows of R^T for cheap column ops
            self.Rt = {j: {j: 1} for j in range(self.ncols)}
        else:
            self.Rt = None
        # lazy heap of (row length, row) candidates for unit-pivot search
        self._heap = [(len(r), i) for i, r in self.rows.items()]
        heapq.heapify(self._heap)

    def _touch(self, i):
        import heapq

        row = self.rows.get(i)
        if row is not None:
            heapq.heappush(self._heap, (len(row), i))

    def _set(self, i, j, v):
        row = self.rows.get(i)
        if v == 0:
            if row and j in row:
                del row[j]
                if not row:
                    del self.rows[i]
                s = self.cols.get(j)
                s.discard(i)
                if not s:
                    del self.cols[j]
        else:
            if row is None:
                row = {}
                self.rows[i] = row
            row[j] = v
            self.cols.setdefault(j, set()).add(i)

    def row_op(self, dst, src, k):
        """row[dst] += k * row[src]"""
        if k == 0:
            return
        srow = self.rows.get(src, {})
        drow = self.rows.get(dst, {})
        for j, v in list(srow.items()):
            nv = drow.get(j, 0) + k * v
            self._set(dst, j, nv)
            drow = self.rows.get(dst, {})
        self._touch(dst)
        if self.L is not None:
            lsrc = self.L.get(src, {})
            ldst = self.L.setdefault(dst, {})
            for j, v in lsrc.items():
                nv = ldst.get(j, 0) + k * v
                if nv:
                    ldst[j] = nv
                elif j in ldst:
                    del ldst[j]

    def col_op(self, dst, src, k):
        """col[dst] += k * col[src]"""
        if k == 0:
            return
        for i in list(self.cols.get(src, ())):
            v = self.rows[i].get(src, 0)
            nv = self.rows.get(i, {}).get(dst, 0) + k * v
            self._set(i, dst, nv)
            self._touch(i)
        if self.Rt is not None:
            rsrc = self.Rt.get(src, {})
            rdst = self.Rt.setdefault(dst, {})
            for j, v in rsrc.items():
                nv = rdst.get(j, 0) + k * v
                if nv:
                    rdst[j] = nv
                elif j in rdst:
                    del rdst[j]

    def swap_rows(self, i1, i2):
        if i1 == i2:
            return
        r1, r2 = self.rows.get(i1), self.rows.get(i2)
        for j in set((r1 or {}).keys()) | set((r2 or {}).keys()):
            s = self.cols[j]
            in1, in2 = i1 in s, i2 in s
            if in1 != in2:
                if in1:
                    s.discard(i1)
                    s.add(i2)
                else:
                    s.discard(i2)
                    s.add(i1)
        if r1 is None:
            self.rows.pop(i2, None)
            if r2 is not None:
                self.rows[i1] = r2
        elif r2 is None:
            self.rows.pop(i1, None)
            self.rows[i2] = r1
        else:
            self.rows[i1], self.rows[i2] = r2, r1
        self._touch(i1)
        self._touch(i2)
        if self.L is not None:
            l1, l2 = self.L.get(i1, {}), self.L.get(i2, {})
            self.L[i1], self.L[i2] = l2, l1

    def swap_cols(self, j1, j2):
        if j1 == j2:
            return
        for i in self.cols.get(j1, set()) | self.cols.get(j2, set()):
            row = self.rows[i]
            v1, v2 = row.get(j1, 0), row.get(j2, 0)
            self._set(i, j1, 0)
            self._set(i, j2, 0)
            if v2:
                self._set(i, j1, v2)
            if v1:
                self._set(i, j2, v1)
        if self.Rt is not None:
            r1, r2 = self.Rt.get(j1, {}), self.Rt.get(j2, {})
            self.Rt[j1], self.Rt[j2] = r2, r1

    def negate_row(self, i):
        row = self.rows.get(i)
        if row:
            for j in row:
                row[j] = -row[j]
        if self.L is not None and i in self.L:
            lrow = self.L[i]
            for j in lrow:
                lrow[j] = -lrow[j]

    def pick_pivot(self):
        """(i, j) minimizing (non-unit, Markowitz cost, |v|, i, j) over a
        candidate pool built from the sparsest rows and columns."""
        if not self.rows:
            return None
        best = None
        # candidate rows: a few sparsest rows; plus rows of sparsest columns
        rows_by_len = sorted(self.rows.items(), key=lambda kv: (len(kv[1]), kv[0]))[:6]
        cand = []
        for i, row in rows_by_len:
            for j, v in row.items():
                cand.append((i, j, v))
        cols_by_len = sorted(self.cols.items(), key=lambda kv: (len(kv[1]), kv[0]))[:4]
        for j, s in cols_by_len:
            for i in s:
                cand.append((i, j, self.rows[i][j]))
        for (i, j, v) in cand:
            cost = (len(self.rows[i]) - 1) * (len(self.cols[j]) - 1)
            key = (abs(v) != 1, cost, abs(v), i, j)
            if best is None or key < best[0]:
                best = (key, i, j)
        return best[1], best[2]

    def pick_unit_pivot(self):
        """A +-1 pivot from the sparsest live row that has one (lazy heap);
        ties inside the row broken by column count."""
        import heapq

        stash = []
        found = None
        while self._heap:
            l, i = heapq.heappop(self._heap)
            row = self.rows.get(i)
            if row is None or len(row) != l:
                continue  # stale; a fresh entry exists if the row is alive
            best = None
            for j, v in row.items():
                if v == 1 or v == -1:
                    key = (len(self.cols[j]), j)
                    if best is None or key < best:
                        best = key
            if best is None:
                # no unit entry right now: leave the row out of the heap; any
                # later modification re-inserts it via _touch
                continue
            found = (i, best[1])
            heapq.heappush(self._heap, (l, i))
            break
        return found

    def eliminate_at_unit(self, i, j):
        """Clear row i and column j at a +-1 pivot; returns nothing."""
        v = self.rows[i][j]
        if v < 0:
            self.negate_row(i)
        for i2 in [r for r in self.cols[j] if r != i]:
            self.row_op(i2, i, -self.rows[i2][j])
        for j2 in [c for c in self.rows[i] if c != j]:
            self.col_op(j2, j, -self.rows[i][j2])
        self._set(i, j, 0)

    def max_bits(self):
        mx = 0
        for row in self.rows.values():
            for v in row.values():
                b = v.bit_length()
                if b > mx:
                    mx = b
        return mx

    def remaining_block(self):
        """The current matrix as (dense block, row index map, col index map)."""
        rowidx = sorted(self.rows)
        colidx = sorted(self.cols)
        rpos = {i: k for k, i in enumerate(rowidx)}
        cpos = {j: k for k, j in enumerate(colidx)}
        dense = [[0] * len(colidx) for _ in rowidx]
        for i, row in self.rows.items():
            for j, v in row.items():
                dense[rpos[i]][cpos[j]] = v
        return dense, rowidx, colidx




def smith_normal_form(
    A: SparseIntMatrix,
    want_transforms: bool = False,
    modular_check: bool = False,
    rng: random.Random | None = None,
    bit_limit: int = 4096,
) -> SnfResult:
    """Invariant factors d_1 | d_2 | ... of an integer matrix.

    Two phases: sparse elimination restricted to +-1 pivots (Markowitz
    fill control, no pivot-induced coefficient blowup), then a dense
    modular pass on the residual block, working modulo a verified multiple
    of its largest invariant factor.  A modular-rank prepass fixes the
    target rank of the residual block.

    With ``want_transforms`` the result carries unimodular L (nrows x nrows)
    and R (ncols x ncols) with L*A*R equal to the diagonal of the invariant
    factors placed at (k, k); this uses the fully exact (growth-prone)
    elimination and is intended for small matrices.

    ``modular_check`` recomputes the rank modulo three random 60-bit primes
    and aborts on mismatch with the exact factor count.
    """
    if want_transforms:
        return _snf_with_transforms(A, modular_check=modular_check, rng=rng)
    elim = _Eliminator(A)
    nunits = 0
    check_every = 2048
    while True:
        hit = elim.pick_unit_pivot()
        if hit is None:
            break
        elim.eliminate_at_unit(*hit)
        nunits += 1
        if nunits % check_every == 0 and elim.max_bits() > bit_limit:
            break
    diag = [1] * nunits
    if elim.rows:
        dense, _ri, _ci = elim.remaining_block()
        diag += _dense_invariant_factors_mod(dense, rng=rng)
    factors = _fix_divisibility(diag)
    res = SnfResult(invariant_factors=factors, rank=len(factors))
    if modular_check:
        _modular_rank_check(A, res, rng=rng)
    return res


def _dense_rank_and_pivots_mod_p(dense, p):
    """(rank, pivot rows, pivot cols) of a dense matrix over F_p (numpy).
    Pivot indices refer to the original matrix."""
    import numpy as np

    W = np.array([[v % p for v in row] for row in dense], dtype=np.int64)
    nr, nc = W.shape
    perm = list(range(nr))
    prow, pcol = [], []
    r = 0
    for j in range(nc):
        if r == nr:
            break
        nz = np.nonzero(W[r:, j])[0]
        if len(nz) == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            W[[r, i]] = W[[i, r]]
            perm[r], perm[i] = perm[i], perm[r]
        inv = pow(int(W[r, j]), p - 2, p)
        W[r] = (W[r] * inv) % p
        col = W[r + 1 :, j].copy()
        mask = col != 0
        if mask.any():
            W[r + 1 :][mask] = (W[r + 1 :][mask] - col[mask, None] * W[r][None, :]) % p
        prow.append(perm[r])
        pcol.append(j)
        r += 1
    return r, prow, pcol


def _dense_rank_pivots(dense, rng):
    """Exact-with-high-probability rank and an integer-nonsingular pivot
    submatrix: two random word-size primes must agree on the rank."""
    q1 = _random_prime_in(rng, 1 << 19, 1 << 20)
    q2 = _random_prime_in(rng, 1 << 19, 1 << 20)
    r1, pr1, pc1 = _dense_rank_and_pivots_mod_p(dense, q1)
    r2, pr2, pc2 = _dense_rank_and_pivots_mod_p(dense, q2)
    while r1 != r2:
        q3 = _random_prime_in(rng, 1 << 19, 1 << 20)
        r3, pr3, pc3 = _dense_rank_and_pivots_mod_p(dense, q3)
        r1, pr1, pc1 = max(
            [(r1, pr1, pc1), (r2, pr2, pc2), (r3, pr3, pc3)], key=lambda t: t[0]
        )
        r2, pr2, pc2 = r3, pr3, pc3
        if r1 == r3:
            break
    return r1, pr1, pc1


def _random_prime_in(rng, lo, hi):
    while True:
        n = rng.randrange(lo, hi) | 1
        if _is_probable_prime(n):
            return n


def _dense_invariant_factors_mod(dense, rng=None):
    """Invariant factors of a dense integer block.

    Small blocks: arithmetic modulo d = |det| of a nonsingular rank-sized
    pivot submatrix (a multiple of the largest invariant factor), so entries
    never exceed d.  Large blocks: d is shrunk first to roughly the product
    of all invariant factors by gcd-ing determinants of random column
    combinations (Cauchy-Binet makes each a multiple of that product), then
    the p-part of the Smith chain is read off per prime by valuation
    pivoting, which never grows coefficients.
    """
    rng = rng or random.Random(0xD15C0)
    nr = len(dense)
    nc = len(dense[0]) if nr else 0
    if nr == 0 or nc == 0:
        return []
    r, prow, pcol = _dense_rank_pivots(dense, rng)
    if r == 0:
        return []
    if min(nr, nc) <= 120:
        sub = [[dense[i][j] for j in pcol] for i in prow]
        d = abs(_det_exact(sub))
        assert d != 0, "pivot submatrix unexpectedly singular"
        if d > 1:
            r2, prow2, pcol2 = _dense_rank_pivots(dense, rng)
            if r2 == r and (prow2 != prow or pcol2 != pcol):
                sub2 = [[dense[i][j] for j in pcol2] for i in prow2]
                d2 = abs(_det_exact(sub2))
                if d2:
                    d = math.gcd(d, d2)
        if d == 1:
            return [1] * r
        pivots = _snf_mod_d(dense, d)
        factors = [math.gcd(p, d) for p in pivots] + [d] * (max(0, r - len(pivots)))
        factors = _fix_divisibility(factors)
        return factors[:r]
    d = 0
    stable = 0
    for _ in range(8):
        D = _projected_minor(dense, r, prow, pcol, rng)
        if D == 0:
            continue
        nd = math.gcd(d, D)
        stable = stable + 1 if nd == d else 0
        d = nd
        if d == 1 or stable >= 2:
            break
    assert d != 0, "projected minors all vanished"
    if d == 1:
        return [1] * r
    from .homology import factorize  # runtime import; no cycle at load

    try:
        fac = factorize(d, budget=200000)
    except ArithmeticError:
        # unfactorable modulus: fall back to full mod-d elimination
        pivots = _snf_mod_d(dense, d)
        factors = [math.gcd(p, d) for p in pivots] + [d] * (max(0, r - len(pivots)))
        return _fix_divisibility(factors)[:r]
    exps_by_p = {}
    for p, e in sorted(fac.items()):
        exps = _local_smith_exponents(dense, p, e + 1, r)
        if any(exps):
            exps_by_p[p] = sorted(exps)
    factors = []
    for i in range(r):
        f = 1
        for p, exps in exps_by_p.items():
            f *= p ** exps[i]
        factors.append(f)
    return sorted(factors)


def _projected_minor(dense, r, prow, pcol, rng):
    """det(Y B X) for integer projections seeded with the pivot rows/columns
    plus sparse random +-1 noise; Cauchy-Binet makes any such determinant a
    multiple of the product d_1 ... d_r of the invariant factors."""
    nr, nc = len(dense), len(dense[0])
    # C = B X: column jout = pivot column pcol[jout] + 3 random signed columns
    C = [[0] * r for _ in range(nr)]
    for jout in range(r):
        picks = [(pcol[jout], 1)] + [
            (rng.randrange(nc), rng.choice((1, -1))) for _ in range(3)
        ]
        for i in range(nr):
            row = dense[i]
            s = 0
            for (j, sg) in picks:
                s += sg * row[j]
            C[i][jout] = s
    if nr == r:
        M = C
    else:
        M = [[0] * r for _ in range(r)]
        for iout in range(r):
            picks = [(prow[iout], 1)] + [
                (rng.randrange(nr), rng.choice((1, -1))) for _ in range(3)
            ]
            for jj in range(r):
                s = 0
                for (i, sg) in picks:
                    s += sg * C[i][jj]
                M[iout][jj] = s
    return _det_exact(M)


def _snf_mod_d(dense, d):
    """Diagonal entries from SNF elimination carried out modulo d (valid
    because the lattice implicitly contains d times every unit vector)."""
    W = [[_symmetric_mod(v, d) for v in row] for row in dense]
    nr, nc = len(W), len(W[0])
    pivots = []
    k = 0
    while k < min(nr, nc):
        best = None
        for i in range(k, nr):
            Wi = W[i]
            for j in range(k, nc):
                v = Wi[j]
                if v:
                    key = (abs(v), i, j)
                    if best is None or key < best[0]:
                        best = (key, i, j)
            if best is not None and best[0][0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        if pi != k:
            W[k], W[pi] = W[pi], W[k]
        if pj != k:
            for row in W:
                row[k], row[pj] = row[pj], row[k]
        while True:
            for i in range(k + 1, nr):
                b = W[i][k]
                if b == 0:
                    continue
                a = W[k][k]
                if b % a == 0:
                    q = b // a
                    Wk, Wi = W[k], W[i]
                    for j in range(k, nc):
                        Wi[j] = _symmetric_mod(Wi[j] - q * Wk[j], d)
                else:
                    g, x, y = _xgcd(a, b)
                    u, v = a // g, b // g
                    Wk, Wi = W[k], W[i]
                    for j in range(k, nc):
                        wk, wi = Wk[j], Wi[j]
                        Wk[j] = _symmetric_mod(x * wk + y * wi, d)
                        Wi[j] = _symmetric_mod(-v * wk + u * wi, d)
            dirty = False
            for j in range(k + 1, nc):
                b = W[k][j]
                if b == 0:
                    continue
                a = W[k][k]
                if b % a == 0:
                    q = b // a
                    for i in range(k, nr):
                        W[i][j] = _symmetric_mod(W[i][j] - q * W[i][k], d)
                else:
                    g, x, y = _xgcd(a, b)
                    u, v = a // g, b // g
                    for i in range(k, nr):
                        wk, wj = W[i][k], W[i][j]
                        W[i][k] = _symmetric_mod(x * wk + y * wj, d)
                        W[i][j] = _symmetric_mod(-v * wk + u * wj, d)
                    dirty = True
            if not dirty:
                if any(W[i][k] for i in range(k + 1, nr)):
                    continue
                break
        piv = abs(W[k][k])
        if piv == 0:
            piv = d
        pivots.append(piv)
        k += 1
    return pivots


def _symmetric_mod(v, d):
    v %= d
    if v > d // 2:
        v -= d
    return v


def _local_smith_exponents(dense, p, k, r):
    """p-adic valuations of the invariant factors (length r, unsorted order
    sorted by the caller), via min-valuation pivoting over Z/p^k."""
    pk = p**k
    if pk < (1 << 31):
        return _local_smith_exponents_numpy(dense, p, k, r, pk)
    return _local_smith_exponents_python(dense, p, k, r, pk)


def _local_smith_exponents_numpy(dense, p, k, r, pk):
    import numpy as np

    M = np.array([[v % pk for v in row] for row in dense], dtype=np.int64)
    nr, nc = M.shape
    # valuation table, recomputed lazily per pivot on the live region
    live_rows = np.ones(nr, dtype=bool)
    live_cols = np.ones(nc, dtype=bool)
    exps = []
    for _ in range(r):
        sub = M[np.ix_(live_rows, live_cols)]
        if not sub.size or not sub.any():
            break
        # find minimal valuation entry
        vals = np.full(sub.shape, k, dtype=np.int64)
        tmp = sub.copy()
        nonzero = tmp != 0
        for j in range(k):
            mask = nonzero & (tmp % p != 0) & (vals == k)
            vals[mask] = j
            tmp = tmp // p
        jmin = int(vals.min())
        if jmin >= k:
            break
        pos = np.argwhere(vals == jmin)[0]
        ridx = np.where(live_rows)[0]
        cidx = np.where(live_cols)[0]
        pi, pj = int(ridx[pos[0]]), int(cidx[pos[1]])
        pj_power = p**jmin
        u = (M[pi, pj] // pj_power) % pk
        uinv = pow(int(u), -1, pk)
        # clear column pj
        col = M[:, pj]
        mults = ((col // pj_power) * uinv) % pk
        mults[pi] = 0
        mults[~live_rows] = 0
        if mults.any():
            M = (M - mults[:, None] * M[pi][None, :]) % pk
        # clear row pi
        row = M[pi, :]
        mults = ((row // pj_power) * uinv) % pk
        mults[pj] = 0
        mults[~live_cols] = 0
        if mults.any():
            M = (M - M[:, pj][:, None] * mults[None, :]) % pk
        live_rows[pi] = False
        live_cols[pj] = False
        exps.append(jmin)
    exps += [0] * (r - len(exps))
    return exps[:r]


def _local_smith_exponents_python(dense, p, k, r, pk):
    M = [[v % pk for v in row] for row in dense]
    nr, nc = len(M), len(M[0])
    live_r = set(range(nr))
    live_c = set(range(nc))

    def val(x):
        v = 0
        while x % p == 0:
            x //= p
            v += 1
            if v >= k:
                return k
        return v

    exps = []
    for _ in range(r):
        best = None
        for i in live_r:
            Mi = M[i]
            for j in live_c:
                x = Mi[j]
                if x:
                    v = val(x)
                    if v < k and (best is None or v < best[0]):
                        best = (v, i, j)
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        jmin, pi, pj = best
        pw = p**jmin
        u = (M[pi][pj] // pw) % pk
        uinv = pow(u, -1, pk)
        for i in live_r:
            if i == pi or M[i][pj] == 0:
                continue
            m = (M[i][pj] // pw) * uinv % pk
            Mi, Mp = M[i], M[pi]
            for j in live_c:
                Mi[j] = (Mi[j] - m * Mp[j]) % pk
        for j in live_c:
            if j == pj or M[pi][j] == 0:
                continue
            m = (M[pi][j] // pw) * uinv % pk
            for i in live_r:
                M[i][j] = (M[i][j] - m * M[i][pj]) % pk
        live_r.discard(pi)
        live_c.discard(pj)
        exps.append(jmin)
    exps += [0] * (r - len(exps))
    return exps[:r]


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def _det_exact(mat):
    """Exact determinant: Bareiss for small, CRT over word primes otherwise."""
    n = len(mat)
    if n <= 70:
        return _det_bareiss([row[:] for row in mat])
    return _det_crt(mat)


def _det_crt(mat):
    """Determinant by CRT over word-size primes (numpy eliminations); big
    entries are pre-split into base-2^16 digits so the per-prime reduction
    is vectorized."""
    import numpy as np

    n = len(mat)
    bound = 1
    for row in mat:
        s = math.isqrt(sum(v * v for v in row)) + 1
        bound *= s
    bound = 2 * bound + 1
    maxbits = max((abs(v).bit_length() for row in mat for v in row), default=1)
    L = maxbits // 16 + 1
    D = np.zeros((n, n, L), dtype=np.int64)
    S = np.zeros((n, n), dtype=np.int64)
    for i, row in enumerate(mat):
        for j, v in enumerate(row):
            S[i, j] = 1 if v >= 0 else -1
            a = abs(v)
            l = 0
            while a:
                D[i, j, l] = a & 0xFFFF
                a >>= 16
                l += 1
    rng = random.Random(0xC27D + n)
    m = 1
    residue = 0
    stable = 0
    while m < bound:
        p = _random_prime_in(rng, 1 << 19, 1 << 20)
        pw = np.empty(L, dtype=np.int64)
        acc = 1
        for l in range(L):
            pw[l] = acc
            acc = (acc << 16) % p
        W = ((D * pw[None, None, :]).sum(axis=2) * S) % p
        detp = 1
        for k in range(n):
            nz = np.nonzero(W[k:, k])[0]
            if len(nz) == 0:
                detp = 0
                break
            i = k + int(nz[0])
            if i != k:
                W[[k, i]] = W[[i, k]]
                detp = -detp
            detp = detp * int(W[k, k]) % p
            inv = pow(int(W[k, k]), p - 2, p)
            col = W[k + 1 :, k].copy()
            mask = col != 0
            if mask.any():
                W[k + 1 :][mask] = (
                    W[k + 1 :][mask] - ((col[mask, None] * inv) % p) * W[k][None, :]
                ) % p
        detp %= p
        g, inv_m, _ = _xgcd(m % p, p)
        t = (detp - residue) % p * inv_m % p
        prev_sym = residue if residue <= (m - 1) // 2 else residue - m
        residue = residue + m * t
        m *= p
        sym = residue if residue <= (m - 1) // 2 else residue - m
        # the symmetric-range reconstruction stabilizes once m exceeds
        # 2|det|; five consecutive no-change primes leave a miss chance
        # below 2^-95
        stable = stable + 1 if sym == prev_sym else 0
        if stable >= 5:
            break
    residue %= m
    if residue > m // 2:
        residue -= m
    return residue


def _snf_with_transforms(A, modular_check=False, rng=None):
    """Dense SNF with unimodular transform tracking (for small matrices).

    Classical global-minimum pivoting: move the least entry of the working
    block to the corner, reduce its row and column, and repeat until the
    pivot divides the whole block, so L*A*R is the Smith form directly.
    """
    nr, nc = A.nrows, A.ncols
    W = A.to_dense()
    L = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)]
    R = [[1 if i == j else 0 for j in range(nc)] for i in range(nc)]

    def row_op(dst, src, k):
        W[dst] = [x + k * y for x, y in zip(W[dst], W[src])]
        L[dst] = [x + k * y for x, y in zip(L[dst], L[src])]

    def col_op(dst, src, k):
        for row in W:
            row[dst] += k * row[src]
        for row in R:
            row[dst] += k * row[src]

    def swap_rows(i1, i2):
        if i1 != i2:
            W[i1], W[i2] = W[i2], W[i1]
            L[i1], L[i2] = L[i2], L[i1]

    def swap_cols(j1, j2):
        if j1 != j2:
            for row in W:
                row[j1], row[j2] = row[j2], row[j1]
            for row in R:
                row[j1], row[j2] = row[j2], row[j1]

    def negate_row(i):
        W[i] = [-x for x in W[i]]
        L[i] = [-x for x in L[i]]

    def move_least_to_corner(s):
        best = None
        for i in range(s, nr):
            for j in range(s, nc):
                v = W[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
        if best is None:
            return False
        _, i, j = best
        swap_rows(s, i)
        swap_cols(s, j)
        if W[s][s] < 0:
            negate_row(s)
        return True

    def reduce_edging(s):
        for i in range(s + 1, nr):
            if W[i][s]:
                row_op(i, s, -(W[i][s] // W[s][s]))
        for j in range(s + 1, nc):
            if W[s][j]:
                col_op(j, s, -(W[s][j] // W[s][s]))

    def edging_nonzero(s):
        return any(W[i][s] for i in range(s + 1, nr)) or any(
            W[s][j] for j in range(s + 1, nc)
        )

    def move_least_edging(s):
        best = (abs(W[s][s]), s, s)
        for i in range(s + 1, nr):
            if W[i][s] and abs(W[i][s]) < best[0]:
                best = (abs(W[i][s]), i, s)
        for j in range(s + 1, nc):
            if W[s][j] and abs(W[s][j]) < best[0]:
                best = (abs(W[s][j]), s, j)
        _, i, j = best
        if i != s:
            swap_rows(s, i)
        elif j != s:
            swap_cols(s, j)
        if W[s][s] < 0:
            negate_row(s)

    k = 0
    limit = min(nr, nc)
    diag = []
    while k < limit:
        if not move_least_to_corner(k):
            break
        reduce_edging(k)
        while True:
            while edging_nonzero(k):
                move_least_edging(k)
                reduce_edging(k)
            if W[k][k] < 0:
                negate_row(k)
            # make the pivot divide the remaining block
            piv = W[k][k]
            offender = None
            for i in range(k + 1, nr):
                for j in range(k + 1, nc):
                    if W[i][j] % piv:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_op(k, offender, 1)
        diag.append(W[k][k])
        k += 1
    factors = [d for d in diag if d != 0]
    res = SnfResult(
        invariant_factors=factors,
        rank=len(factors),
        left=SparseIntMatrix.from_dense(L),
        right=SparseIntMatrix.from_dense(R),
    )
    if modular_check:
        _modular_rank_check(A, res, rng=rng)
    return res


def _modular_rank_check(A, res: SnfResult, rng=None, nprimes: int = 3):
    rng = rng or random.Random(0xB1A2C41)
    for _ in range(nprimes):
        p = _random_prime_60bit(rng)
        rk = rank_mod_p(A, p)
        expect = sum(1 for d in res.invariant_factors if d % p)
        if rk != expect:
            raise AssertionError(
                f"modular SNF check failed at p={p}: rank {rk} vs {expect}"
            )
    res.modular_checked = True


def _random_prime_60bit(rng):
    while True:
        n = rng.getrandbits(60) | (1 << 59) | 1
        if _is_probable_prime(n):
            return n


def _is_probable_prime(n, trials=20):
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    rng = random.Random(n)
    for _ in range(trials):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def rank_mod_p(A: SparseIntMatrix, p: int) -> int:
    """Rank over F_p by sparse elimination (unit pivots, no growth)."""
    rows = {}
    cols = {}
    for (i, j, v) in A.entries():
        v %= p
        if v:
            rows.setdefault(i, {})[j] = v
            cols.setdefault(j, set()).add(i)
    rank = 0
    while rows:
        # sparsest column, then sparsest row in it
        j = min(cols, key=lambda c: (len(cols[c]), c))
        i = min(cols[j], key=lambda r: (len(rows[r]), r))
        piv = rows[i][j]
        inv = pow(piv, p - 2, p)
        prow = rows.pop(i)
        for jj in prow:
            s = cols.get(jj)
            s.discard(i)
            if not s:
                del cols[jj]
        rank += 1
        targets = list(cols.get(j, ()))
        for i2 in targets:
            row2 = rows[i2]
            mult = row2[j] * inv % p
            for jj, v in prow.items():
                nv = (row2.get(jj, 0) - mult * v) % p
                if nv:
                    if jj not in row2:
                        cols.setdefault(jj, set()).add(i2)
                    row2[jj] = nv
                else:
                    if jj in row2:
                        del row2[jj]
                        s = cols.get(jj)
                        s.discard(i2)
                        if not s:
                            del cols[jj]
            if not row2:
                del rows[i2]
    return rank


def exact_rank(A: SparseIntMatrix) -> int:
    """Exact rank: agreeing ranks at two random large primes (each a lower
    bound that is tight outside finitely many primes), verified equal."""
    rng = random.Random(0x5EED + A.nrows * 1315423911 + A.ncols)
    r1 = rank_mod_p(A, _random_prime_60bit(rng))
    r2 = rank_mod_p(A, _random_prime_60bit(rng))
    if r1 == r2:
        return r1
    return max(r1, r2, rank_mod_p(A, _random_prime_60bit(rng)))


# ---------------------------------------------------------------------------
# Dense exact helpers (Python ints): HNF, kernel, inverse


def row_hnf(mat):
    """Row Hermite normal form of a dense integer matrix (list of lists).

    Returns the list of nonzero HNF rows: row-echelon, positive pivots,
    entries above each pivot reduced to [0, pivot).
    """
    rows = [list(map(int, r)) for r in mat if any(r)]
    if not rows:
        return []
    ncols = len(rows[0])
    out = []
    col = 0
    while rows and col < ncols:
        nz = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        if not nz:
            rows = rest
            col += 1
            continue
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            base = nz[0]
            nxt = []
            for r in nz[1:]:
                q = r[col] // base[col]
                rr = [x - q * y for x, y in zip(r, base)]
                if rr[col]:
                    nxt.append(rr)
                elif any(rr):
                    rest.append(rr)
            nz = [base] + nxt
        piv = nz[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        out.append(piv)
        rows = rest
        col += 1
    # reduce above pivots
    for k in range(len(out) - 1, -1, -1):
        pcol = next(j for j, x in enumerate(out[k]) if x)
        pval = out[k][pcol]
        for m in range(k):
            q = out[m][pcol] // pval
            if q:
                out[m] = [x - q * y for x, y in zip(out[m], out[k])]
    return out


def kernel_basis(mat):
    """Basis of the right integer kernel of a dense matrix; the basis spans
    ker cap Z^n (saturated, since it is the kernel of an integer matrix)."""
    A = SparseIntMatrix.from_dense(mat)
    res = smith_normal_form(A, want_transforms=True)
    n = A.ncols
    r = res.rank
    Rt = res.right.transpose()
    basis = []
    for k in range(r, n):
        vec = [Rt.get(k, j) for j in range(n)]
        basis.append(vec)
    return basis


def solve_upper_unimodular(hnf_rows, target):
    """Solve x * H = target over Z for H in row-HNF; None if unsolvable."""
    t = list(map(int, target))
    coeffs = []
    for row in hnf_rows:
        pcol = next(j for j, x in enumerate(row) if x)
        q, rem = divmod(t[pcol], row[pcol])
        if rem:
            return None
        coeffs.append(q)
        t = [x - q * y for x, y in zip(t, row)]
    if any(t):
        return None
    return coeffs


def minors_gcd_invariant_factors(mat):
    """Oracle: d_k = gcd(k-minors)/gcd((k-1)-minors), by direct enumeration.

    Exponential in size; intended for matrices up to ~8x8.
    """
    from itertools import combinations

    rows = [list(map(int, r)) for r in mat]
    n = len(rows)
    m = len(rows[0]) if rows else 0
    prev = 1
    factors = []
    for k in range(1, min(n, m) + 1):
        g = 0
        for rset in combinations(range(n), k):
            for cset in combinations(range(m), k):
                sub = [[rows[i][j] for j in cset] for i in rset]
                g = math.gcd(g, _det_bareiss(sub))
                if g == prev:  # gcd can only shrink toward gcd of all, early out
                    break
            if g == prev:
                break
        if g == 0:
            break
        factors.append(g // prev)
        prev = g
    return factors


def _det_bareiss(mat):
    a = [row[:] for row in mat]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]
