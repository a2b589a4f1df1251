"""Arithmetic of imaginary quadratic fields F = Q(sqrt(d)), d < 0 squarefree.

Everything is exact: elements are pairs of integers in the basis (1, omega),
ideals are 2x2 upper-triangular Hermite normal forms over Z, and the class
number comes from enumerating reduced binary quadratic forms.  The only
floating point lives in the Dedekind zeta evaluators at the bottom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

EUCLIDEAN_DS = (-1, -2, -3, -7, -11)


def is_squarefree(n: int) -> bool:
    n = abs(n)
    if n == 0:
        return False
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for n >= 0."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    if n < 0:
        raise ValueError("n must be nonnegative")
    result = 1
    if n % 2 == 0:
        if a % 2 == 0:
            return 0
        while n % 2 == 0:
            n //= 2
            if a % 8 in (3, 5):
                result = -result
    a %= n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


class QuadraticField:
    """The imaginary quadratic field of squarefree discriminant d < 0.

    omega = sqrt(d) when d = 2, 3 mod 4 and (1 + sqrt(d))/2 when d = 1 mod 4,
    so O_F = Z[omega] and omega^2 = omega_t * omega + omega_n.
    """

    def __init__(self, d: int):
        if d >= 0:
            raise ValueError("d must be negative")
        if not is_squarefree(d):
            raise ValueError("d must be squarefree")
        self.d = d
        if d % 4 == 1:
            self.disc = d
            self.omega_t = 1
            self.omega_n = (d - 1) // 4
            self.omega_is_half_integral = True
        else:
            self.disc = 4 * d
            self.omega_t = 0
            self.omega_n = d
            self.omega_is_half_integral = False
        # complex embedding of omega, for lattice geometry only
        if self.omega_is_half_integral:
            self.omega_complex = complex(0.5, math.sqrt(-d) / 2.0)
        else:
            self.omega_complex = complex(0.0, math.sqrt(-d))

    def __repr__(self):
        return f"QuadraticField(d={self.d})"

    def __eq__(self, other):
        return isinstance(other, QuadraticField) and other.d == self.d

    def __hash__(self):
        return hash(("QuadraticField", self.d))

    def element(self, a, b=0) -> "FieldElement":
        return FieldElement(self, a, b)

    @property
    def zero(self):
        return FieldElement(self, 0, 0)

    @property
    def one(self):
        return FieldElement(self, 1, 0)

    @property
    def omega(self):
        return FieldElement(self, 0, 1)

    def sqrt_d(self) -> "FieldElement":
        """The element sqrt(d) itself (equals 2*omega - 1 when d = 1 mod 4)."""
        if self.omega_is_half_integral:
            return FieldElement(self, -1, 2)
        return FieldElement(self, 0, 1)

    def units(self):
        """All units of O_F."""
        one = self.one
        units = [one, -one]
        if self.d == -1:
            units += [self.omega, -self.omega]
        elif self.d == -3:
            w = self.omega
            units += [w, -w, w * w, -(w * w)]
        return units

    def is_euclidean(self) -> bool:
        return self.d in EUCLIDEAN_DS


def make_field(d: int) -> QuadraticField:
    return QuadraticField(d)


class FieldElement:
    """a + b*omega with integer a, b."""

    __slots__ = ("field", "a", "b")

    def __init__(self, field: QuadraticField, a: int, b: int = 0):
        self.field = field
        self.a = int(a)
        self.b = int(b)

    def __repr__(self):
        return f"({self.a}+{self.b}w)" if self.b else f"({self.a})"

    def __eq__(self, other):
        if isinstance(other, int):
            return self.a == other and self.b == 0
        return (
            isinstance(other, FieldElement)
            and self.field == other.field
            and self.a == other.a
            and self.b == other.b
        )

    def __hash__(self):
        return hash((self.a, self.b, self.field.d))

    def __add__(self, other):
        other = self._coerce(other)
        return FieldElement(self.field, self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        other = self._coerce(other)
        return FieldElement(self.field, self.a - other.a, self.b - other.b)

    def __neg__(self):
        return FieldElement(self.field, -self.a, -self.b)

    def __mul__(self, other):
        other = self._coerce(other)
        t, n = self.field.omega_t, self.field.omega_n
        a, b, c, d = self.a, self.b, other.a, other.b
        return FieldElement(self.field, a * c + b * d * n, a * d + b * c + b * d * t)

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        return self._coerce(other) - self

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("mixed fields")
            return other
        if isinstance(other, int):
            return FieldElement(self.field, other, 0)
        return NotImplemented

    def conjugate(self):
        t = self.field.omega_t
        return FieldElement(self.field, self.a + self.b * t, -self.b)

    def norm(self) -> int:
        t, n = self.field.omega_t, self.field.omega_n
        return self.a * self.a + self.a * self.b * t - self.b * self.b * n

    def trace(self) -> int:
        return 2 * self.a + self.b * self.field.omega_t

    def is_zero(self):
        return self.a == 0 and self.b == 0

    def is_unit(self):
        return self.norm() == 1

    def to_complex(self) -> complex:
        return self.a + self.b * self.field.omega_complex

    def divmod(self, other: "FieldElement"):
        """Division with remainder of norm < N(other) on the five
        norm-Euclidean fields: round the omega coordinate first, then
        re-center the rational coordinate (needed for d = -7, -11)."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero element")
        nn = other.norm()
        num = self * other.conjugate()
        qa = Fraction(num.a, nn)
        qb = Fraction(num.b, nn)
        b = round_half_even(qb)
        t = self.field.omega_t
        a = round_half_even(qa + (qb - b) * Fraction(t, 2))
        q = FieldElement(self.field, a, b)
        r = self - q * other
        return q, r

    def __floordiv__(self, other):
        return self.divmod(self._coerce(other))[0]

    def __mod__(self, other):
        return self.divmod(self._coerce(other))[1]

    def exact_div(self, other: "FieldElement") -> "FieldElement":
        q, r = self.divmod(self._coerce(other))
        if not r.is_zero():
            raise ValueError(f"{self} not divisible by {other}")
        return q


def round_half_even(x: Fraction) -> int:
    fl = x.numerator // x.denominator
    frac = x - fl
    if frac > Fraction(1, 2):
        return fl + 1
    if frac < Fraction(1, 2):
        return fl
    return fl + (fl % 2)


def gcd_elements(x: FieldElement, y: FieldElement) -> FieldElement:
    """Euclidean gcd; valid on the norm-Euclidean fields."""
    if not x.field.is_euclidean():
        raise ValueError("gcd needs a Euclidean field")
    while not y.is_zero():
        x, y = y, x % y
    return x


# ---------------------------------------------------------------------------
# Ideals


def _row_hnf_2cols(rows):
    """Hermite normal form of an integer lattice spanned by 2-column rows.

    Returns (a, b, c) for the upper-triangular basis [[a, b], [0, c]]
    (generators a + b*omega and c*omega), or None if rank < 2.
    """
    rows = [(int(r0), int(r1)) for (r0, r1) in rows if r0 or r1]
    if not rows:
        return None
    # c = gcd of omega-coefficients of elements with zero 1-coefficient;
    # do a Euclidean sweep on the first column.
    work = rows[:]
    pivot = None
    while True:
        nonzero = [r for r in work if r[0] != 0]
        zeros = [r for r in work if r[0] == 0]
        if not nonzero:
            pivot = None
            work = zeros
            break
        if len(nonzero) == 1:
            pivot = nonzero[0]
            if pivot[0] < 0:
                pivot = (-pivot[0], -pivot[1])
            work = zeros
            break
        nonzero.sort(key=lambda r: abs(r[0]))
        base = nonzero[0]
        reduced = [base]
        for r in nonzero[1:]:
            q = r[0] // base[0]
            rr = (r[0] - q * base[0], r[1] - q * base[1])
            reduced.append(rr)
        work = reduced + zeros
    c = 0
    for (_z, v) in work:
        c = math.gcd(c, v)
    if pivot is None or c == 0:
        return None
    a, b = pivot
    b %= c
    return (a, b, c)


class IdealLattice:
    """Nonzero integral ideal stored as the HNF rows [[a, b], [0, c]]."""

    __slots__ = ("field", "a", "b", "c")

    def __init__(self, field: QuadraticField, a: int, b: int, c: int):
        self.field = field
        self.a, self.b, self.c = int(a), int(b), int(c)
        if self.a <= 0 or self.c <= 0 or not (0 <= self.b < self.c):
            raise ValueError(f"not a reduced HNF: {(a, b, c)}")

    @property
    def hnf(self):
        return ((self.a, self.b), (0, self.c))

    @property
    def norm(self) -> int:
        return self.a * self.c

    def __repr__(self):
        return f"Ideal[{self.a}+{self.b}w, {self.c}w]"

    def __eq__(self, other):
        return (
            isinstance(other, IdealLattice)
            and self.field == other.field
            and (self.a, self.b, self.c) == (other.a, other.b, other.c)
        )

    def __hash__(self):
        return hash((self.field.d, self.a, self.b, self.c))

    def generators(self):
        F = self.field
        return [F.element(self.a, self.b), F.element(0, self.c)]

    def contains(self, x: FieldElement) -> bool:
        # solve m*(a, b) + n*(0, c) = (x.a, x.b) over Z
        if x.a % self.a:
            return False
        m = x.a // self.a
        return (x.b - m * self.b) % self.c == 0

    def reduce(self, x: FieldElement) -> FieldElement:
        """Canonical representative of x modulo the ideal."""
        m = x.a // self.a
        u = x.a - m * self.a
        v = x.b - m * self.b
        v %= self.c
        return FieldElement(self.field, u, v)

    def contains_ideal(self, other: "IdealLattice") -> bool:
        return all(self.contains(g) for g in other.generators())

    def __mul__(self, other: "IdealLattice"):
        rows = []
        for g in self.generators():
            for h in other.generators():
                p = g * h
                rows.append((p.a, p.b))
        return _ideal_from_rows(self.field, rows)

    def is_closed_under_omega(self) -> bool:
        w = self.field.omega
        return all(self.contains(g * w) for g in self.generators())

    def residue_ring(self) -> "ResidueRing":
        return ResidueRing(self)

    def conjugate(self) -> "IdealLattice":
        rows = []
        for g in self.generators():
            gc = g.conjugate()
            rows.append((gc.a, gc.b))
            gw = gc * self.field.omega
            rows.append((gw.a, gw.b))
        return _ideal_from_rows(self.field, rows)

    def is_principal_generated_by(self, x: FieldElement) -> bool:
        return abs(x.norm()) == self.norm and self.contains(x)


def _ideal_from_rows(field, rows) -> IdealLattice:
    hnf = _row_hnf_2cols(rows)
    if hnf is None:
        raise ValueError("zero ideal")
    return IdealLattice(field, *hnf)


def ideal_from_generators(field: QuadraticField, gens) -> IdealLattice:
    """The O_F-ideal generated by the given elements (Z-span of g and omega*g)."""
    rows = []
    for g in gens:
        if isinstance(g, int):
            g = field.element(g)
        rows.append((g.a, g.b))
        gw = g * field.omega
        rows.append((gw.a, gw.b))
    if not any(r != (0, 0) for r in rows):
        raise ValueError("zero ideal")
    return _ideal_from_rows(field, rows)


def principal_ideal(field: QuadraticField, g) -> IdealLattice:
    return ideal_from_generators(field, [g])


def unit_ideal(field: QuadraticField) -> IdealLattice:
    return IdealLattice(field, 1, 0, 1)


def prime_ideals_above(field: QuadraticField, p: int):
    """Prime ideals over the rational prime p, as (ideal, ramification e, degree f)."""
    t, n = field.omega_t, field.omega_n
    chi = kronecker(field.disc, p)
    if chi == -1:
        return [(principal_ideal(field, p), 1, 2)]
    # roots of x^2 - t x - n mod p
    roots = [r for r in range(p) if (r * r - t * r - n) % p == 0]
    if chi == 0:
        r = roots[0]
        pr = ideal_from_generators(field, [field.element(p), field.element(-r, 1)])
        return [(pr, 2, 1)]
    assert len(roots) == 2
    out = []
    for r in roots:
        pr = ideal_from_generators(field, [field.element(p), field.element(-r, 1)])
        out.append((pr, 1, 1))
    return out


def factor_ideal(field: QuadraticField, ideal: IdealLattice):
    """Prime factorization [(prime, exponent), ...]; recombines exactly."""
    result = []
    nm = ideal.norm
    for p in _prime_factors(nm):
        for (pr, _e, _f) in prime_ideals_above(field, p):
            k = 0
            power = unit_ideal(field)
            while True:
                nxt = power * pr
                if nxt.contains_ideal(ideal):
                    power = nxt
                    k += 1
                else:
                    break
            if k:
                result.append((pr, k))
    check = unit_ideal(field)
    for pr, k in result:
        for _ in range(k):
            check = check * pr
    if check != ideal:
        raise AssertionError(f"factorization failed to recombine for {ideal}")
    return result


def _prime_factors(n: int):
    out = []
    k = 2
    while k * k <= n:
        if n % k == 0:
            out.append(k)
            while n % k == 0:
                n //= k
        k += 1
    if n > 1:
        out.append(n)
    return out


def ideals_of_norm_up_to(field: QuadraticField, bound: int):
    """All nonzero integral ideals of norm <= bound, by prime combination."""
    primes = []
    for p in range(2, bound + 1):
        if len(_prime_factors(p)) == 1 and _prime_factors(p)[0] == p:
            for (pr, _e, _f) in prime_ideals_above(field, p):
                if pr.norm <= bound:
                    primes.append(pr)
    out = [unit_ideal(field)]
    for pr in primes:
        cur = list(out)
        for ideal in cur:
            power = ideal
            while True:
                power = power * pr
                if power.norm > bound:
                    break
                out.append(power)
    return sorted(out, key=lambda I: (I.norm, I.a, I.b, I.c))


def prime_ideals_of_norm_up_to(field: QuadraticField, bound: int):
    out = []
    for p in range(2, bound + 1):
        facs = _prime_factors(p)
        if facs == [p]:
            for (pr, _e, _f) in prime_ideals_above(field, p):
                if pr.norm <= bound:
                    out.append(pr)
    return sorted(set(out), key=lambda I: (I.norm, I.a, I.b, I.c))


# ---------------------------------------------------------------------------
# Residue rings


class ResidueRing:
    """O_F / I with canonical representatives and exact arithmetic."""

    def __init__(self, ideal: IdealLattice):
        self.ideal = ideal
        self.field = ideal.field
        self.representatives = [
            self.field.element(x, y)
            for x in range(ideal.a)
            for y in range(ideal.c)
        ]

    @property
    def size(self):
        return self.ideal.norm

    def reduce(self, x: FieldElement) -> FieldElement:
        return self.ideal.reduce(x)

    def add(self, x, y):
        return self.reduce(x + y)

    def mul(self, x, y):
        return self.reduce(x * y)

    def neg(self, x):
        return self.reduce(-x)

    def is_unit(self, x: FieldElement) -> bool:
        J = ideal_from_generators(self.field, [x, *self.ideal.generators()]) if not x.is_zero() else None
        if x.is_zero():
            return self.ideal.norm == 1
        return J.norm == 1

    def unit_group(self):
        return [r for r in self.representatives if self.is_unit(r)]

    def inverse(self, x: FieldElement) -> FieldElement:
        # lift, solve x*y = 1 mod I via HNF linear algebra on small rings
        for y in self.representatives:
            if self.mul(x, y) == self.reduce(self.field.one):
                return y
        raise ZeroDivisionError(f"{x} not invertible mod {self.ideal}")


def euler_phi_ideal(field: QuadraticField, ideal: IdealLattice) -> int:
    """|(O/I)^x| = N(I) * prod_{p | I} (1 - 1/N(p))."""
    nm = ideal.norm
    val = Fraction(nm)
    for pr, _k in factor_ideal(field, ideal):
        val *= Fraction(pr.norm - 1, pr.norm)
    assert val.denominator == 1
    return int(val)


# ---------------------------------------------------------------------------
# Class numbers via reduced binary quadratic forms


def reduced_forms(disc: int):
    """Primitive reduced forms (a, b, c) of the given negative discriminant."""
    assert disc < 0 and disc % 4 in (0, 1)
    forms = []
    amax = math.isqrt(-disc // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b * b - disc) % (4 * a):
                continue
            c = (b * b - disc) // (4 * a)
            if c < a:
                continue
            if b < 0 and (abs(b) == a or a == c):
                continue
            if math.gcd(math.gcd(a, abs(b)), c) != 1:
                continue
            forms.append((a, b, c))
    return forms


def class_number(field: QuadraticField) -> int:
    return len(reduced_forms(field.disc))


# ---------------------------------------------------------------------------
# Dedekind zeta


def ideal_count_coefficients(field: QuadraticField, cutoff: int):
    """r(n) = #ideals of norm n for n <= cutoff, via r = 1 * chi_disc."""
    import numpy as np

    chi = np.zeros(cutoff + 1, dtype=np.int64)
    for d in range(1, cutoff + 1):
        chi[d] = kronecker(field.disc, d)
    r = np.zeros(cutoff + 1, dtype=np.int64)
    for d in range(1, cutoff + 1):
        if chi[d]:
            r[d::d] += chi[d]
    return r


def zeta_tail_bound(sigma: float, cutoff: int) -> float:
    """Upper bound for |sum_{n > cutoff} r(n) n^{-s}| when sigma = Re(s) > 1.

    Uses r(n) <= d(n) and sum_{n<=t} d(n) <= t (1 + ln t), then partial
    summation (integral comparison).
    """
    if sigma <= 1:
        return math.inf
    X = float(cutoff)
    s = sigma
    # s * int_X^inf (1 + ln t) t^-s dt
    i1 = X ** (1 - s) / (s - 1)
    i2 = X ** (1 - s) * (math.log(X) * (s - 1) + 1) / (s - 1) ** 2
    return s * (i1 + i2)


@dataclass
class ZetaValue:
    value: complex
    error_bound: float
    method: str


class ZetaPoleError(ArithmeticError):
    pass


class DedekindZeta:
    """Evaluator for zeta_F: Dirichlet partial sums for Re(s) > 1 and the
    incomplete-gamma (theta-split) Epstein continuation elsewhere."""

    def __init__(self, field: QuadraticField):
        self.field = field
        self.w = len(field.units())
        self.forms = reduced_forms(field.disc)
        self._coeff_cache = {}

    def _coeffs(self, cutoff):
        if cutoff not in self._coeff_cache:
            self._coeff_cache[cutoff] = ideal_count_coefficients(self.field, cutoff)
        return self._coeff_cache[cutoff]

    def partial_sum(self, s: complex, cutoff: int) -> ZetaValue:
        import numpy as np

        if cutoff < 10:
            raise ValueError("cutoff must be >= 10")
        s = complex(s)
        if abs(s - 1) < 1e-12:
            raise ZetaPoleError("zeta_F has a pole at s = 1")
        if s.real <= 1:
            raise ValueError("partial sums require Re(s) > 1")
        r = self._coeffs(cutoff)
        n = np.arange(1, cutoff + 1, dtype=np.float64)
        terms = r[1:] * np.exp(-s * np.log(n))
        val = complex(terms.sum())
        return ZetaValue(val, zeta_tail_bound(s.real, cutoff), "dirichlet")

    def _lattice_values(self, form, qmax: float):
        """Nonzero values Q(m, n) <= qmax with multiplicity, for Q = (a, b, c)."""
        a, b, c = form
        vals = []
        mbound = math.isqrt(int(4 * c * qmax / (4 * a * c - b * b))) + 1
        nbound = math.isqrt(int(4 * a * qmax / (4 * a * c - b * b))) + 1
        for m in range(-mbound, mbound + 1):
            for n in range(-nbound, nbound + 1):
                if m == 0 and n == 0:
                    continue
                q = a * m * m + b * m * n + c * n * n
                if q <= qmax:
                    vals.append(q)
        return vals

    @lru_cache(maxsize=None)
    def _epstein_terms(self, form):
        delta = Fraction(-self.field.disc, 4)
        t0 = math.pi / math.sqrt(float(delta))
        qmax = 42.0 / t0
        a, b, c = form
        adj = (c, -b, a)
        return (t0, tuple(self._lattice_values(form, qmax)), tuple(self._lattice_values(adj, qmax)))

    def continuation(self, s: complex) -> ZetaValue:
        s = complex(s)
        if abs(s - 1) < 1e-10 or abs(s) < 1e-10:
            raise ZetaPoleError("continuation evaluator excludes s in {0, 1}")
        mp = mpmath.mp
        old = mp.dps
        mp.dps = 30
        try:
            ms = mpmath.mpc(s)
            total = mpmath.mpf(0)
            for form in self.forms:
                t0, qs, qhats = self._epstein_terms(form)
                t0m = mpmath.mpf(t0)
                acc = mpmath.mpc(0)
                for q in qs:
                    acc += mpmath.gammainc(ms, t0m * q) * mpmath.power(q, -ms)
                pref = mpmath.power(mpmath.pi, 2 * ms - 1) * mpmath.power(
                    mpmath.mpf(-self.field.disc) / 4, mpmath.mpf(1) / 2 - ms
                )
                acc2 = mpmath.mpc(0)
                for q in qhats:
                    acc2 += mpmath.gammainc(1 - ms, t0m * q) * mpmath.power(q, ms - 1)
                acc += pref * acc2
                acc += mpmath.power(t0m, ms) * (1 / (ms - 1) - 1 / ms)
                total += acc / mpmath.gamma(ms)
            total /= self.w
            val = complex(total)
        finally:
            mp.dps = old
        return ZetaValue(val, 1e-18, "epstein")

    def __call__(self, s: complex, cutoff: int = 100000) -> complex:
        s = complex(s)
        if abs(s - 1) < 1e-10:
            raise ZetaPoleError("zeta_F has a pole at s = 1")
        if s.real > 1.5:
            return self.partial_sum(s, cutoff).value
        return self.continuation(s).value


def dedekind_zeta(field: QuadraticField, s: complex, cutoff: int = 100000) -> ZetaValue:
    z = DedekindZeta(field)
    s = complex(s)
    if s.real > 1:
        return z.partial_sum(s, cutoff)
    return z.continuation(s)


_ZETA_CACHE = {}


def zeta_evaluator(field: QuadraticField) -> DedekindZeta:
    if field.d not in _ZETA_CACHE:
        _ZETA_CACHE[field.d] = DedekindZeta(field)
    return _ZETA_CACHE[field.d]


def covolume(field: QuadraticField) -> float:
    """Humbert: vol(PSL_2(O_F) \\ H^3) = |disc|^{3/2} zeta_F(2) / (4 pi^2)."""
    z2 = zeta_evaluator(field).continuation(2.0).value.real
    return abs(field.disc) ** 1.5 * z2 / (4 * math.pi * math.pi)
