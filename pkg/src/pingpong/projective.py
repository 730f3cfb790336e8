"""Projective points, hyperplanes and the standard metric on P^(n-1)(k).

Distances are d([v],[w]) = ||v ^ w|| / (||v|| ||w||) and, against the kernel
of a linear form f, d([v],[ker f]) = |f(v)| / (||f|| ||v||).  Norms are the
euclidean/hermitian 2-norm over R and C and the sup of coordinate absolute
values over Q_p.  Representatives are canonically normalized so equal lines
yield coordinate-identical representatives.
"""

import math

import numpy as np

from .errors import DomainError
from .fields import FieldSpec, Kind, PadicScalar, relative_tolerance

# coordinates this much below the largest one are treated as zero when
# picking the archimedean phase pivot
_PIVOT_CUTOFF = 1e-12


def as_field_array(field: FieldSpec, arr: np.ndarray) -> np.ndarray:
    """Read-only numpy array of the dtype carried by an archimedean field."""
    if field.kind is Kind.COMPLEX:
        arr = arr.astype(np.complex128)
    else:
        if np.iscomplexobj(arr):
            if np.abs(arr.imag).max() > 0:
                raise DomainError("real field cannot hold complex entries")
            arr = arr.real
        arr = arr.astype(np.float64)
    arr.setflags(write=False)
    return arr


class Vector:
    """Coordinate vector over one of the supported fields.

    Archimedean coordinates live in a read-only numpy array, p-adic ones in
    a tuple of PadicScalar.  Instances are immutable.
    """

    __slots__ = ("field", "coords")

    def __init__(self, field: FieldSpec, coords):
        if field.is_padic:
            coords = tuple(field.scalar(c) for c in coords)
        else:
            arr = np.array(list(coords))
            if arr.ndim != 1:
                raise DomainError("vector coordinates must be one-dimensional")
            coords = as_field_array(field, arr)
        if len(coords) == 0:
            raise DomainError("empty vector")
        self.field = field
        self.coords = coords

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __iter__(self):
        return iter(self.coords)

    def norm(self) -> float:
        if self.field.is_padic:
            return max(c.abs() for c in self.coords)
        return float(np.linalg.norm(self.coords))

    def scaled(self, s) -> "Vector":
        s = self.field.scalar(s)
        return Vector(self.field, [c * s for c in self.coords])

    def __repr__(self):
        return f"Vector({self.field}, {list(self.coords)!r})"


def _check_compatible(v: Vector, w: Vector):
    if v.field != w.field:
        raise DomainError(f"mixed fields: {v.field} and {w.field}")
    if len(v) != len(w):
        raise DomainError(f"mixed dimensions: {len(v)} and {len(w)}")


def norm(v: Vector) -> float:
    return v.norm()


def wedge_coefficients(v: Vector, w: Vector) -> Vector:
    """v ^ w in the basis e_i ^ e_j, pairs (i,j) with i < j in lex order."""
    _check_compatible(v, w)
    n = len(v)
    coeffs = []
    for i in range(n):
        for j in range(i + 1, n):
            coeffs.append(v[i] * w[j] - v[j] * w[i])
    return Vector(v.field, coeffs)


def wedge_norm(v: Vector, w: Vector) -> float:
    return wedge_coefficients(v, w).norm()


def form_value(form: Vector, v: Vector):
    """f(v) = sum f_i v_i, with no conjugation: forms are linear."""
    _check_compatible(form, v)
    if form.field.is_padic:
        total = form.field.zero()
        for a, b in zip(form.coords, v.coords):
            total = total + a * b
        return total
    total = np.sum(form.coords * v.coords)
    return complex(total) if form.field.kind is Kind.COMPLEX else float(total)


def _canonical_rep(v: Vector) -> Vector:
    """Scale v so that equal lines give coordinate-identical vectors."""
    if v.field.is_padic:
        vals = [c.valuation for c in v.coords]
        lead = min(vals)
        if lead == math.inf:
            raise DomainError("projective representative must be nonzero")
        pivot = v.coords[vals.index(lead)]
        return Vector(v.field, [c / pivot for c in v.coords])
    arr = v.coords
    biggest = float(np.max(np.abs(arr)))
    if biggest == 0.0:
        raise DomainError("projective representative must be nonzero")
    pivot_at = int(np.argmax(np.abs(arr) > _PIVOT_CUTOFF * biggest))
    pivot = arr[pivot_at]
    if v.field.kind is Kind.COMPLEX:
        phase = pivot / abs(pivot)
    else:
        phase = 1.0 if pivot > 0 else -1.0
    return Vector(v.field, arr / (phase * float(np.linalg.norm(arr / biggest)) * biggest))


class ProjPoint:
    """Point of projective space, held by its canonical representative.

    Over R and C the representative has unit norm and a positive (real)
    first nonzero coordinate; over Q_p all coordinates lie in Z_p and the
    first unit coordinate is 1.
    """

    __slots__ = ("rep",)

    def __init__(self, v: Vector):
        self.rep = _canonical_rep(v)

    @property
    def field(self) -> FieldSpec:
        return self.rep.field

    def __len__(self):
        return len(self.rep)

    def __eq__(self, other):
        if not isinstance(other, ProjPoint):
            return NotImplemented
        if self.field != other.field or len(self) != len(other):
            return False
        if self.field.is_padic:
            return all(a == b for a, b in zip(self.rep.coords, other.rep.coords))
        return proj_dist(self, other) <= relative_tolerance()

    def __repr__(self):
        return f"ProjPoint({self.rep!r})"


class ProjHyperplane:
    """Projective hyperplane ker f, held by the canonical rep of the form f."""

    __slots__ = ("form",)

    def __init__(self, form: Vector):
        self.form = _canonical_rep(form)

    @property
    def field(self) -> FieldSpec:
        return self.form.field

    def __len__(self):
        return len(self.form)

    def contains(self, P: ProjPoint) -> bool:
        d = dist_to_hyperplane(P, self)
        return d == 0.0 if self.field.is_padic else d <= relative_tolerance()

    def __eq__(self, other):
        if not isinstance(other, ProjHyperplane):
            return NotImplemented
        if self.field != other.field or len(self) != len(other):
            return False
        if self.field.is_padic:
            return all(a == b for a, b in zip(self.form.coords, other.form.coords))
        return wedge_norm(self.form, other.form) <= relative_tolerance()

    def __repr__(self):
        return f"ProjHyperplane({self.form!r})"


def proj_dist(P: ProjPoint, Q: ProjPoint) -> float:
    """Standard metric; values in [0,1], an ultrametric over Q_p."""
    v, w = P.rep, Q.rep
    _check_compatible(v, w)
    if v.field.is_padic:
        # canonical reps have sup norm exactly 1
        return wedge_norm(v, w)
    return wedge_norm(v, w) / (v.norm() * w.norm())


def dist_to_hyperplane(P: ProjPoint, H: ProjHyperplane) -> float:
    """d([v], [ker f]) = |f(v)| / (||f|| ||v||)."""
    v, f = P.rep, H.form
    _check_compatible(v, f)
    if v.field.is_padic:
        return form_value(f, v).abs()
    return abs(form_value(f, v)) / (v.norm() * f.norm())
