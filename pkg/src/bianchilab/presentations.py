"""Finite presentations of SL_2(O_F) over the five norm-Euclidean imaginary
quadratic fields (d = -1, -2, -3, -7, -11).

The generator matrices are always

    a = [[0, -1], [1, 0]],  t = [[1, 1], [0, 1]],  u = [[1, w], [0, 1]],

plus, for d = -1 and d = -3, the diagonal unit l = diag(conj(w0), w0) where
w0 generates the unit group.  The relator lists below present the projective
groups PSL_2(O_F); they are the classical fundamental-domain presentations
(Swan's method) and every relator is verified against the matrix images at
load time.  The SL_2 presentation is the canonical central lift: relators
that evaluate to -1 are corrected by the word z = a^2 (which maps to -1),
and z^2 = 1 plus centrality of z are imposed.  Both extensions of the
projective group by the order-2 center, the lifted presentation and
SL_2(O_F) itself, are identified by the evaluation map, so the lift presents
SL_2(O_F) whenever the projective presentation is complete.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dataclass_field

from .field import QuadraticField, make_field
from .matrices import Mat2, commutator_word, evaluate_word, free_reduce, invert_word
from .smith import SparseIntMatrix, smith_normal_form

SUPPORTED_DS = (-1, -2, -3, -7, -11)

# generator name -> matrix entries as coordinate pairs in the basis (1, omega)
_A = (1,)
_T = (2,)
_U = (3,)
_L = (4,)


def _inv(g):
    return (-g[0],)


def _pow(g, n):
    if n >= 0:
        return g * n
    return _inv(g) * (-n)


def _concat(*words):
    out = []
    for w in words:
        out.extend(w)
    return tuple(out)


# Projective relator words per field (signed 1-based indices into GENS order).
_PSL_RELATORS = {
    -1: [
        _pow(_A, 2),
        _pow(_L, 2),
        _pow(_concat(_A, _L), 2),
        _pow(_concat(_T, _A), 3),
        _pow(_concat(_U, _A, _L), 3),
        commutator_word(_T, _U),
        _concat(_L, _T, _inv(_L), _T),
        _concat(_L, _U, _inv(_L), _U),
    ],
    -2: [
        _pow(_A, 2),
        _pow(_concat(_T, _A), 3),
        commutator_word(_T, _U),
        _pow(_concat(_A, _inv(_U), _A, _U), 2),
    ],
    -3: [
        _pow(_A, 2),
        _pow(_L, 3),
        _pow(_concat(_A, _L), 2),
        _pow(_concat(_T, _A), 3),
        _pow(_concat(_U, _A, _L), 3),
        commutator_word(_T, _U),
        _concat(_L, _T, _inv(_L), _U),
        _concat(_L, _U, _inv(_L), _U, _inv(_T)),
    ],
    -7: [
        _pow(_A, 2),
        _pow(_concat(_T, _A), 3),
        commutator_word(_T, _U),
        _pow(_concat(_T, _inv(_U), _A, _U, _A), 2),
    ],
    -11: [
        _pow(_A, 2),
        _pow(_concat(_T, _A), 3),
        commutator_word(_T, _U),
        _pow(_concat(_T, _inv(_U), _A, _U, _A), 3),
    ],
}

_MINUS_ONE_WORD = _pow(_A, 2)  # a^2 = -1 in SL_2


@dataclass
class FinitePresentation:
    """Generators with matrix images and relator words (signed indices).

    ``relator_signs`` records, for the projective relators the presentation
    was lifted from, whether the raw word evaluated to +1 or -1; shipped
    relators always evaluate to the exact identity.
    """

    generator_names: list
    images: list
    relators: list
    relator_signs: list = dataclass_field(default_factory=list)
    field: QuadraticField = None

    def __post_init__(self):
        if self.field is None and self.images:
            self.field = self.images[0].field
        self._inverses = [g.inverse() for g in self.images]

    @property
    def ngens(self):
        return len(self.images)

    def evaluate(self, word) -> Mat2:
        return evaluate_word(word, self.images, self._inverses)

    def to_json(self) -> str:
        payload = {
            "d": self.field.d,
            "generators": list(self.generator_names),
            "images": [list(g.to_pairs()) for g in self.images],
            "relators": [list(r) for r in self.relators],
            "relator_signs": list(self.relator_signs),
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    @staticmethod
    def from_json(text: str) -> "FinitePresentation":
        payload = json.loads(text)
        field = make_field(payload["d"])
        images = [Mat2.from_pairs(field, pairs) for pairs in payload["images"]]
        return FinitePresentation(
            generator_names=list(payload["generators"]),
            images=images,
            relators=[tuple(r) for r in payload["relators"]],
            relator_signs=list(payload.get("relator_signs", [])),
            field=field,
        )


class UnsupportedFieldError(ValueError):
    pass


def _generator_images(field: QuadraticField):
    one, zero, w = field.one, field.zero, field.omega
    gens = {
        "a": Mat2(zero, -one, one, zero),
        "t": Mat2(one, one, zero, one),
        "u": Mat2(one, w, zero, one),
    }
    names = ["a", "t", "u"]
    if field.d in (-1, -3):
        gens["l"] = Mat2(w.conjugate(), zero, zero, w)
        names.append("l")
    return names, [gens[n] for n in names]


def presentation(field: QuadraticField) -> FinitePresentation:
    """The SL_2(O_F) presentation for a norm-Euclidean field."""
    if field.d not in SUPPORTED_DS:
        raise UnsupportedFieldError(
            f"no embedded presentation for d={field.d}; supported: {SUPPORTED_DS}"
        )
    names, images = _generator_images(field)
    inverses = [g.inverse() for g in images]
    relators = []
    signs = []
    for rel in _PSL_RELATORS[field.d]:
        val = evaluate_word(rel, images, inverses)
        if val.is_identity():
            signs.append(+1)
            lifted = free_reduce(rel)
        elif val.is_minus_identity():
            signs.append(-1)
            lifted = free_reduce(_concat(rel, invert_word(_MINUS_ONE_WORD)))
        else:
            raise AssertionError(f"relator {rel} is not central for d={field.d}")
        if lifted:
            relators.append(lifted)
    # center: z = a^2 has order 2 and commutes with every generator
    relators.append(_pow(_A, 4))
    signs.append(+1)
    for k in range(2, len(names) + 1):
        g = (k,)
        relators.append(free_reduce(commutator_word(_MINUS_ONE_WORD, g)))
        signs.append(+1)
    pres = FinitePresentation(
        generator_names=names,
        images=images,
        relators=relators,
        relator_signs=signs,
        field=field,
    )
    report = verify_presentation(pres)
    if not report.all_identity:
        bad = [i for i, st in enumerate(report.statuses) if st != "identity"]
        raise AssertionError(f"embedded presentation failed validation at relators {bad}")
    return pres


def psl_presentation(field: QuadraticField) -> FinitePresentation:
    """The projective presentation (relators central, possibly -1)."""
    if field.d not in SUPPORTED_DS:
        raise UnsupportedFieldError(
            f"no embedded presentation for d={field.d}; supported: {SUPPORTED_DS}"
        )
    names, images = _generator_images(field)
    return FinitePresentation(
        generator_names=names,
        images=images,
        relators=[tuple(r) for r in _PSL_RELATORS[field.d]],
        relator_signs=[],
        field=field,
    )


@dataclass
class VerificationReport:
    statuses: list  # per relator: "identity" | "minus-identity" | "fail"
    values: list

    @property
    def all_central(self):
        return all(s in ("identity", "minus-identity") for s in self.statuses)

    @property
    def all_identity(self):
        return all(s == "identity" for s in self.statuses)

    def lines(self):
        out = []
        for k, (s, v) in enumerate(zip(self.statuses, self.values)):
            out.append(f"relator {k}: {s}" + ("" if s != "fail" else f" -> {v}"))
        return out


def verify_presentation(p: FinitePresentation) -> VerificationReport:
    statuses, values = [], []
    for rel in p.relators:
        val = p.evaluate(rel)
        values.append(val)
        if val.is_identity():
            statuses.append("identity")
        elif val.is_minus_identity():
            statuses.append("minus-identity")
        else:
            statuses.append("fail")
    for g in p.images:
        if g.det() != 1:
            statuses.append("fail")
            values.append(g)
    return VerificationReport(statuses, values)


@dataclass
class Abelianization:
    free_rank: int
    torsion_factors: list

    def __eq__(self, other):
        return (
            self.free_rank == other.free_rank
            and self.torsion_factors == other.torsion_factors
        )


def relator_exponent_matrix(p: FinitePresentation) -> SparseIntMatrix:
    M = SparseIntMatrix(len(p.relators), p.ngens)
    for i, rel in enumerate(p.relators):
        for letter in rel:
            M.add_entry(i, abs(letter) - 1, 1 if letter > 0 else -1)
    return M


def abelianization(p: FinitePresentation) -> Abelianization:
    """Invariant factors of the abelianized presentation."""
    M = relator_exponent_matrix(p)
    res = smith_normal_form(M)
    return Abelianization(
        free_rank=p.ngens - res.rank,
        torsion_factors=res.torsion_factors,
    )
