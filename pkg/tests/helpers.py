"""Shared random-matrix generators and small oracles for the test suite."""

import itertools
import math
from fractions import Fraction

import numpy as np

from pingpong.cartan import SLMatrix
from pingpong.fields import Kind, valuation


def random_sl_arch(rng, field, n, spread=1.0):
    """Random SL_n(R) or SL_n(C) matrix: gaussian entries scaled to det 1."""
    while True:
        m = rng.normal(size=(n, n)) * spread
        if field.kind is Kind.COMPLEX:
            m = m + 1j * rng.normal(size=(n, n)) * spread
        det = np.linalg.det(m)
        if abs(det) < 1e-6:
            continue
        if field.kind is Kind.REAL:
            if det < 0:
                m[0] = -m[0]
                det = -det
            return SLMatrix(field, m / float(det) ** (1.0 / n))
        return SLMatrix(field, m / complex(det) ** (1.0 / n))


def random_sl_padic(rng, field, n, ops=8, val_range=2, integral=False):
    """Random SL_n(Q_p) matrix: integer shears around a p-power diagonal.

    integral=True keeps every entry in Z_p (unit shears, no diagonal part),
    which makes the result a projective isometry.
    """
    p = field.prime
    if integral:
        val_range = 0
    rows = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

    def shear():
        i, j = rng.sample(range(n), 2)
        lam = Fraction(rng.randint(-9, 9))
        if not integral:
            lam *= Fraction(p) ** rng.randint(-1, 1)
        if lam:
            for c in range(n):
                rows[j][c] += lam * rows[i][c]

    for _ in range(ops // 2):
        shear()
    exps = [rng.randint(-val_range, val_range) for _ in range(n - 1)]
    exps.append(-sum(exps))
    for i in range(n):
        rows[i] = [x * Fraction(p) ** exps[i] for x in rows[i]]
    for _ in range(ops - ops // 2):
        shear()
    return SLMatrix(field, rows)


def fraction_det(rows):
    """Exact determinant by cofactor expansion (tiny matrices only)."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = Fraction(0)
    for j in range(n):
        if rows[0][j]:
            minor = [[row[c] for c in range(n) if c != j] for row in rows[1:]]
            term = rows[0][j] * fraction_det(minor)
            total += term if j % 2 == 0 else -term
    return total


def smith_valuations_oracle(g):
    """Diagonal valuations via minors: j_k = m_k - m_(k-1), m_k the least
    valuation of a k x k minor."""
    n = g.n
    entries = [[c.value for c in row] for row in g.entries]
    mins = []
    for k in range(1, n + 1):
        best = math.inf
        for rows_ in itertools.combinations(range(n), k):
            for cols in itertools.combinations(range(n), k):
                d = fraction_det([[entries[i][j] for j in cols] for i in rows_])
                if d:
                    best = min(best, valuation(d, g.field))
        mins.append(best)
    out = [mins[0]]
    for k in range(1, n):
        out.append(mins[k] - mins[k - 1])
    return out


def power_iteration_norm(m, iters=400):
    """Largest singular value of a numpy matrix, independent of the SVD."""
    m = np.asarray(m)
    x = np.ones(m.shape[1], dtype=m.dtype) / math.sqrt(m.shape[1])
    for _ in range(iters):
        y = m.conj().T @ (m @ x)
        nrm = np.linalg.norm(y)
        if nrm == 0:
            return 0.0
        x = y / nrm
    return float(math.sqrt(np.linalg.norm(m.conj().T @ (m @ x))))


def batch_proj_dist(u, v):
    """Rowwise projective distances between two stacks of vectors."""
    uu = np.einsum("ij,ij->i", u.conj(), u).real
    vv = np.einsum("ij,ij->i", v.conj(), v).real
    uv = np.abs(np.einsum("ij,ij->i", u.conj(), v)) ** 2
    return np.sqrt(np.clip(1.0 - uv / (uu * vv), 0.0, 1.0))
