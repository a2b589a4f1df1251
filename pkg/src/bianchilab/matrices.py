"""2x2 matrices over O_F and evaluation of words in signed generator indices."""

from __future__ import annotations

from .field import FieldElement, QuadraticField


class Mat2:
    """2x2 matrix over O_F; ordinary matrix algebra, inverse via adjugate."""

    __slots__ = ("m",)

    def __init__(self, m00, m01, m10, m11):
        self.m = (m00, m01, m10, m11)

    @staticmethod
    def identity(field: QuadraticField) -> "Mat2":
        one, zero = field.one, field.zero
        return Mat2(one, zero, zero, one)

    @staticmethod
    def from_pairs(field: QuadraticField, pairs) -> "Mat2":
        return Mat2(*(field.element(a, b) for (a, b) in pairs))

    def to_pairs(self):
        return tuple((x.a, x.b) for x in self.m)

    @property
    def field(self):
        return self.m[0].field

    def __mul__(self, other: "Mat2") -> "Mat2":
        a, b, c, d = self.m
        e, f, g, h = other.m
        return Mat2(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def __neg__(self):
        a, b, c, d = self.m
        return Mat2(-a, -b, -c, -d)

    def __eq__(self, other):
        return isinstance(other, Mat2) and self.m == other.m

    def __hash__(self):
        return hash(tuple((x.a, x.b) for x in self.m))

    def __repr__(self):
        a, b, c, d = self.m
        return f"[[{a},{b}],[{c},{d}]]"

    def det(self) -> FieldElement:
        a, b, c, d = self.m
        return a * d - b * c

    def trace(self) -> FieldElement:
        return self.m[0] + self.m[3]

    def inverse(self) -> "Mat2":
        a, b, c, d = self.m
        det = self.det()
        if det == 1:
            return Mat2(d, -b, -c, a)
        if det == -1:
            return Mat2(-d, b, c, -a)
        raise ValueError("only determinant +-1 matrices are invertible here")

    def is_identity(self) -> bool:
        return self == Mat2.identity(self.field)

    def is_minus_identity(self) -> bool:
        return self == -Mat2.identity(self.field)

    def is_central(self) -> bool:
        return self.is_identity() or self.is_minus_identity()

    def conjugate_entries(self) -> "Mat2":
        a, b, c, d = self.m
        return Mat2(a.conjugate(), b.conjugate(), c.conjugate(), d.conjugate())


def evaluate_word(word, images, inverses=None) -> Mat2:
    """Evaluate a word of signed 1-based generator indices against images."""
    if not images:
        raise ValueError("no generator images")
    field = images[0].field
    acc = Mat2.identity(field)
    for letter in word:
        idx = abs(letter) - 1
        g = images[idx]
        if letter < 0:
            g = inverses[idx] if inverses is not None else g.inverse()
        acc = acc * g
    return acc


def invert_word(word):
    return tuple(-x for x in reversed(word))


def commutator_word(w1, w2):
    return tuple(w1) + tuple(w2) + invert_word(w1) + invert_word(w2)


def free_reduce(word):
    out = []
    for letter in word:
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)
