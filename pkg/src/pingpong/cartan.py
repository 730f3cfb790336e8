"""KAK decomposition of SL_n over R, C and Q_p.

Archimedean decompositions come from the singular value decomposition with a
deterministic phase convention; non-archimedean ones from Smith normal form
over Z_p with minimal-valuation pivoting.  Both produce g = k * diag(a) * k'
with |a_1| >= ... >= |a_n|, k and k' in the maximal compact subgroup, and the
norm identities ||g|| = |a_1|, ||wedge^2 g|| = |a_1 a_2|.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DecompositionError, DomainError, PrecisionExhaustedError
from .fields import FieldSpec, Kind, PadicScalar, relative_tolerance, valuation
from .projective import ProjHyperplane, ProjPoint, Vector, as_field_array


def _fraction_det(rows: list[list[Fraction]]) -> Fraction:
    n = len(rows)
    m = [list(r) for r in rows]
    det = Fraction(1)
    for t in range(n):
        pivot_row = next((i for i in range(t, n) if m[i][t]), None)
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != t:
            m[t], m[pivot_row] = m[pivot_row], m[t]
            det = -det
        det *= m[t][t]
        inv = 1 / m[t][t]
        for i in range(t + 1, n):
            if m[i][t]:
                f = m[i][t] * inv
                m[i] = [a - f * b for a, b in zip(m[i], m[t])]
    return det


def _padic_det(rows) -> "PadicScalar":
    # cofactor expansion along the first row; fine for the small n used here
    n = len(rows)
    if n == 1:
        return rows[0][0]
    field = rows[0][0].field
    total = field.zero()
    for j, top in enumerate(rows[0]):
        if not top.value:
            continue
        minor = [[row[c] for c in range(n) if c != j] for row in rows[1:]]
        term = top * _padic_det(minor)
        total = total + (term if j % 2 == 0 else -term)
    return total


class SLMatrix:
    """Square matrix of determinant one over a supported field.

    Instances are immutable; the inverse and the Cartan decomposition are
    computed once and cached.  ``check=False`` skips determinant validation
    for matrices that are products of validated ones.
    """

    __slots__ = ("field", "entries", "_inverse", "_cartan")

    def __init__(self, field: FieldSpec, rows, check: bool = True):
        if field.is_padic:
            entries = tuple(tuple(field.scalar(x) for x in row) for row in rows)
            n = len(entries)
            if n < 2 or any(len(row) != n for row in entries):
                raise DomainError("matrix must be square of size at least 2")
        else:
            entries = np.array([list(r) for r in rows])
            if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] < 2:
                raise DomainError("matrix must be square of size at least 2")
            entries = as_field_array(field, entries)
        self.field = field
        self.entries = entries
        self._inverse = None
        self._cartan = None
        if check:
            self._check_det()

    def _check_det(self):
        if self.field.is_padic:
            det = _fraction_det([[c.value for c in row] for row in self.entries])
            if det != 1:
                # digit-truncated input may miss 1 by something beyond its precision
                slack = min(c.digits for row in self.entries for c in row)
                if valuation(det - 1, self.field) < slack:
                    raise DomainError(f"determinant is {det}, not 1")
        else:
            det = complex(np.linalg.det(self.entries))
            # a det-1 matrix stored at entry scale s cannot carry a float
            # det closer to 1 than ~s^n * eps, so the gate widens with the
            # scale; it still catches every actually-unnormalized input
            n = len(self.entries)
            scale = float(np.max(np.abs(self.entries)))
            drift = max(1.0, scale) ** n * n * 8 * np.finfo(float).eps
            if abs(det - 1) > max(relative_tolerance(), drift):
                raise DomainError(f"determinant is {det:.12g}, not 1")

    @property
    def n(self) -> int:
        return len(self.entries)

    def row(self, i) -> Vector:
        return Vector(self.field, list(self.entries[i]))

    def column(self, j) -> Vector:
        if self.field.is_padic:
            return Vector(self.field, [row[j] for row in self.entries])
        return Vector(self.field, self.entries[:, j])

    def __matmul__(self, other: "SLMatrix") -> "SLMatrix":
        if not isinstance(other, SLMatrix):
            return NotImplemented
        if self.field != other.field or self.n != other.n:
            raise DomainError("matrix product needs matching fields and sizes")
        if self.field.is_padic:
            n = self.n
            rows = [[sum((self.entries[i][t] * other.entries[t][j] for t in range(n)),
                         self.field.zero())
                     for j in range(n)] for i in range(n)]
        else:
            rows = self.entries @ other.entries
        return SLMatrix(self.field, rows, check=False)

    def apply(self, v: Vector) -> Vector:
        """Matrix-vector product g(v)."""
        if v.field != self.field or len(v) != self.n:
            raise DomainError("vector does not match the matrix")
        if self.field.is_padic:
            coords = [sum((row[j] * v.coords[j] for j in range(self.n)), self.field.zero())
                      for row in self.entries]
            return Vector(self.field, coords)
        return Vector(self.field, self.entries @ v.coords)

    def apply_form(self, f: Vector) -> Vector:
        """Row-vector product f o g, the pullback of the linear form f."""
        if f.field != self.field or len(f) != self.n:
            raise DomainError("form does not match the matrix")
        if self.field.is_padic:
            coords = [sum((f.coords[i] * self.entries[i][j] for i in range(self.n)),
                          self.field.zero())
                      for j in range(self.n)]
            return Vector(self.field, coords)
        return Vector(self.field, f.coords @ self.entries)

    def inverse(self) -> "SLMatrix":
        if self._inverse is None:
            if self.field.is_padic:
                inv = _padic_inverse(self)
            else:
                # adjugate, not LU: det = 1 makes it the inverse, and for
                # n = 2 it stays exact however large the entries grow under
                # composition, where LU sees a numerically singular matrix
                inv = SLMatrix(self.field, _adjugate(self.entries), check=False)
            inv._inverse = self
            self._inverse = inv
        return self._inverse

    def cartan(self, precision_margin: int = 1) -> "CartanTriple":
        """Cached Cartan decomposition of this matrix."""
        return cartan_decompose(self, precision_margin)

    def norm(self) -> float:
        """Operator norm ||g|| = |a_1(g)|."""
        return self.cartan().a_abs[0]

    def __repr__(self):
        rows = [list(r) for r in self.entries]
        return f"SLMatrix({self.field}, {rows!r})"


def _adjugate(entries: np.ndarray) -> np.ndarray:
    n = entries.shape[0]
    if n == 2:
        (a, b), (c, d) = entries
        return np.array([[d, -b], [-c, a]])
    out = np.empty_like(entries)
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(entries, j, axis=0), i, axis=1)
            out[i, j] = (-1) ** (i + j) * np.linalg.det(minor)
    return out


def _padic_inverse(g: SLMatrix) -> SLMatrix:
    n = g.n
    field = g.field
    m = [list(row) + [field.scalar(int(i == j)) for j in range(n)]
         for i, row in enumerate(g.entries)]
    for t in range(n):
        pivot_row = min(range(t, n), key=lambda i: m[i][t].valuation)
        if m[pivot_row][t].valuation == math.inf:
            raise DecompositionError("matrix is singular to working precision")
        if pivot_row != t:
            m[t], m[pivot_row] = m[pivot_row], m[t]
        inv = field.one() / m[t][t]
        m[t] = [x * inv for x in m[t]]
        for i in range(n):
            if i != t and m[i][t].value:
                f = m[i][t]
                m[i] = [a - f * b for a, b in zip(m[i], m[t])]
    return SLMatrix(field, [row[n:] for row in m], check=False)


def identity(field: FieldSpec, n: int) -> SLMatrix:
    return SLMatrix(field, [[int(i == j) for j in range(n)] for i in range(n)], check=False)


def diagonal(field: FieldSpec, diag) -> SLMatrix:
    diag = list(diag)
    n = len(diag)
    return SLMatrix(field, [[diag[i] if i == j else 0 for j in range(n)] for i in range(n)])


@dataclass(frozen=True)
class CartanTriple:
    """g = k * diag(a) * k_prime with |a_1| >= ... >= |a_n|."""

    k: SLMatrix
    a: tuple
    k_prime: SLMatrix

    @property
    def field(self) -> FieldSpec:
        return self.k.field

    @property
    def a_abs(self) -> tuple:
        if self.field.is_padic:
            return tuple(x.abs() for x in self.a)
        return tuple(float(x) for x in self.a)

    @property
    def ratio(self) -> float:
        """|a_2/a_1|, the contraction ratio."""
        if self.field.is_padic:
            return float(self.field.prime) ** (self.a[0].valuation - self.a[1].valuation)
        return float(self.a[1] / self.a[0])

    def reconstruct(self) -> SLMatrix:
        field = self.field
        n = self.k.n
        diag = SLMatrix(field, [[self.a[i] if i == j else 0 for j in range(n)]
                                for i in range(n)], check=False)
        return self.k @ diag @ self.k_prime

    def attracting_point(self) -> ProjPoint:
        """[k(e_1)], the image of the top singular direction."""
        return ProjPoint(self.k.column(0))

    def repulsive_hyperplane(self) -> ProjHyperplane:
        """[span of k'^(-1)(e_i), i >= 2], i.e. the kernel of the first row of k'."""
        return ProjHyperplane(self.k_prime.row(0))


def _cartan_archimedean(g: SLMatrix) -> CartanTriple:
    try:
        u, s, vh = np.linalg.svd(g.entries)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"singular value decomposition failed: {exc}") from exc
    u = u.astype(np.complex128)
    vh = vh.astype(np.complex128)
    # phase convention: first entry of largest magnitude in each of the
    # first n-1 columns of k is made positive real; the last column's phase
    # is pinned by det k = 1; k' absorbs every adjustment
    n = g.n
    for i in range(n - 1):
        col = u[:, i]
        lead = col[int(np.argmax(np.abs(col)))]
        phase = lead / abs(lead)
        u[:, i] /= phase
        vh[i, :] *= phase
    du = complex(np.linalg.det(u))
    du /= abs(du)
    u[:, -1] /= du
    vh[-1, :] *= du
    if g.field.kind is Kind.REAL:
        u = u.real
        vh = vh.real
    k = SLMatrix(g.field, u, check=False)
    k_prime = SLMatrix(g.field, vh, check=False)
    return CartanTriple(k, tuple(float(x) for x in s), k_prime)


def _cartan_padic(g: SLMatrix, precision_margin: int) -> CartanTriple:
    field = g.field
    n = g.n
    worst = min(c.digits for row in g.entries for c in row)
    if worst < n + precision_margin:
        raise PrecisionExhaustedError(
            f"matrix entries carry {worst} digits; decomposition in dimension {n} "
            f"needs at least {n + precision_margin}")
    m = [list(row) for row in g.entries]
    k = [[field.scalar(int(i == j)) for j in range(n)] for i in range(n)]
    k2 = [[field.scalar(int(i == j)) for j in range(n)] for i in range(n)]

    def swap_rows(t, i):
        # M <- EM with signed swap E; k <- kE^(-1): (col t, col i) <- (col i, -col t)
        m[t], m[i] = m[i], [-x for x in m[t]]
        for r in range(n):
            k[r][t], k[r][i] = k[r][i], -k[r][t]

    def swap_cols(t, j):
        for r in range(n):
            m[r][t], m[r][j] = m[r][j], -m[r][t]
        k2[t], k2[j] = k2[j], [-x for x in k2[t]]

    for t in range(n):
        best = None
        for i in range(t, n):
            for j in range(t, n):
                v = m[i][j].valuation
                if best is None or v < best[0]:
                    best = (v, i, j)
        if best[0] == math.inf:
            raise DecompositionError("matrix is singular to working precision")
        _, bi, bj = best
        if bi != t:
            swap_rows(t, bi)
        if bj != t:
            swap_cols(t, bj)
        pivot = m[t][t]
        for i in range(t + 1, n):
            if m[i][t].value:
                f = m[i][t] / pivot
                m[i] = [a - f * b for a, b in zip(m[i], m[t])]
                for r in range(n):
                    k[r][t] = k[r][t] + f * k[r][i]
        for j in range(t + 1, n):
            if m[t][j].value:
                f = m[t][j] / pivot
                for i in range(t, n):
                    m[i][j] = m[i][j] - f * m[i][t]
                k2[t] = [a + f * b for a, b in zip(k2[t], k2[j])]

    # pull unit parts of the diagonal into k', leaving exact powers of p
    a = []
    p = field.prime
    for t in range(n):
        val = m[t][t].valuation
        unit = m[t][t] / field.scalar(Fraction(p) ** val)
        a.append(field.scalar(Fraction(p) ** val))
        k2[t] = [unit * x for x in k2[t]]
    return CartanTriple(SLMatrix(field, k, check=False), tuple(a),
                        SLMatrix(field, k2, check=False))


def cartan_decompose(g: SLMatrix, precision_margin: int = 1) -> CartanTriple:
    """Decompose g = k * diag(a) * k' with the module's conventions."""
    if g._cartan is None:
        if g.field.is_padic:
            g._cartan = _cartan_padic(g, precision_margin)
        else:
            g._cartan = _cartan_archimedean(g)
    return g._cartan


def exterior_power(g: SLMatrix, i: int) -> SLMatrix:
    """Matrix of wedge^i g on the lex-ordered basis of i-subsets."""
    n = g.n
    if not 1 <= i <= n - 1:
        raise DomainError(f"exterior power index must be in [1, {n - 1}], got {i}")
    subsets = list(itertools.combinations(range(n), i))
    if g.field.is_padic:
        rows = [[_padic_det([[g.entries[r][c] for c in T] for r in S]) for T in subsets]
                for S in subsets]
    else:
        arr = np.asarray(g.entries)
        rows = [[np.linalg.det(arr[np.ix_(S, T)]) for T in subsets] for S in subsets]
    return SLMatrix(g.field, rows, check=False)


def bilip_constant(g: SLMatrix) -> float:
    """|a_1/a_n|^2, a Lipschitz constant for [g] and [g^(-1)] on all of P^(n-1)."""
    t = g.cartan()
    if g.field.is_padic:
        return float(g.field.prime) ** (2 * (t.a[-1].valuation - t.a[0].valuation))
    return (t.a[0] / t.a[-1]) ** 2


def operator_norm(g: SLMatrix) -> float:
    return g.cartan().a_abs[0]


def wedge_operator_norm(g: SLMatrix) -> float:
    """||wedge^2 g|| = |a_1 a_2|."""
    a = g.cartan().a_abs
    return a[0] * a[1]


def apply_point(g: SLMatrix, P: ProjPoint) -> ProjPoint:
    return ProjPoint(g.apply(P.rep))


def apply_hyperplane(g: SLMatrix, H: ProjHyperplane) -> ProjHyperplane:
    """[g(ker f)] = [ker f o g^(-1)]."""
    return ProjHyperplane(g.inverse().apply_form(H.form))
