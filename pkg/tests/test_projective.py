import math
import random
from fractions import Fraction

import numpy as np
import pytest

from pingpong.errors import DomainError
from pingpong.fields import COMPLEX, REAL, padic
from pingpong.projective import (
    ProjHyperplane,
    ProjPoint,
    Vector,
    dist_to_hyperplane,
    form_value,
    norm,
    proj_dist,
    wedge_coefficients,
    wedge_norm,
)

Q5 = padic(5)


def test_norms():
    assert norm(Vector(REAL, [3, 4])) == 5
    assert norm(Vector(Q5, [1, 5])) == 1
    assert norm(Vector(REAL, [0, 0])) == 0
    assert norm(Vector(Q5, [0, 0])) == 0


def test_wedge_norms():
    e1 = Vector(REAL, [1, 0])
    e2 = Vector(REAL, [0, 1])
    assert wedge_norm(e1, e2) == 1
    assert wedge_norm(e1, e1) == 0
    f1 = Vector(Q5, [1, 0])
    assert wedge_norm(f1, f1) == 0
    assert wedge_norm(f1, Vector(Q5, [1, 5])) == 0.2


def test_wedge_basis_order():
    v = Vector(REAL, [1, 2, 3])
    w = Vector(REAL, [4, 5, 6])
    # pairs (0,1), (0,2), (1,2)
    got = wedge_coefficients(v, w)
    assert list(got.coords) == [1 * 5 - 2 * 4, 1 * 6 - 3 * 4, 2 * 6 - 3 * 5]


def test_proj_dist_examples():
    e1 = ProjPoint(Vector(REAL, [1, 0]))
    e2 = ProjPoint(Vector(REAL, [0, 1]))
    assert proj_dist(e1, e2) == pytest.approx(1.0)
    diag = ProjPoint(Vector(REAL, [1, 1]))
    assert proj_dist(e1, diag) == pytest.approx(1 / math.sqrt(2))
    p = ProjPoint(Vector(Q5, [1, 0]))
    q = ProjPoint(Vector(Q5, [1, 5]))
    assert proj_dist(p, q) == 0.2
    assert proj_dist(p, p) == 0.0


def test_dist_to_hyperplane_examples():
    ker_x1 = ProjHyperplane(Vector(REAL, [1, 0]))
    assert dist_to_hyperplane(ProjPoint(Vector(REAL, [1, 0])), ker_x1) == pytest.approx(1.0)
    assert dist_to_hyperplane(ProjPoint(Vector(REAL, [1, 1])), ker_x1) == pytest.approx(1 / math.sqrt(2))
    h = ProjHyperplane(Vector(Q5, [1, 5]))
    assert dist_to_hyperplane(ProjPoint(Vector(Q5, [1, 0])), h) == 1.0
    assert h.contains(ProjPoint(Vector(Q5, [-5, 1])))


def test_canonical_reps_are_scale_invariant():
    v = Vector(REAL, [0.3, -1.2, 0.7])
    a = ProjPoint(v)
    b = ProjPoint(v.scaled(-2.7))
    np.testing.assert_allclose(a.rep.coords, b.rep.coords, atol=1e-12)
    assert a.rep.coords[0] > 0
    assert norm(a.rep) == pytest.approx(1.0, abs=1e-12)

    w = Vector(COMPLEX, [1j, 2 - 1j])
    c = ProjPoint(w)
    d = ProjPoint(w.scaled(0.4 + 2.1j))
    np.testing.assert_allclose(c.rep.coords, d.rep.coords, atol=1e-12)
    assert abs(c.rep.coords[0].imag) < 1e-12 and c.rep.coords[0].real > 0

    u = Vector(Q5, [Fraction(10), Fraction(3), Fraction(50)])
    p = ProjPoint(u)
    q = ProjPoint(u.scaled(Fraction(-7, 5)))
    assert all(x == y for x, y in zip(p.rep.coords, q.rep.coords))
    # coordinates integral, first unit coordinate is 1
    assert all(x.valuation >= 0 for x in p.rep.coords)
    assert p.rep.coords[1] == 1
    assert p == q

    with pytest.raises(DomainError):
        ProjPoint(Vector(REAL, [0, 0]))


def _random_padic_point(rng, n):
    while True:
        coords = [Fraction(rng.randint(-20, 20)) * Fraction(5) ** rng.randint(-1, 1)
                  for _ in range(n)]
        if any(coords):
            return ProjPoint(Vector(Q5, coords))


def test_metric_axioms():
    rng = np.random.default_rng(11)
    for _ in range(10_000):
        p, q, r = (ProjPoint(Vector(REAL, rng.normal(size=3))) for _ in range(3))
        dpq = proj_dist(p, q)
        assert 0.0 <= dpq <= 1.0 + 1e-12
        assert dpq == pytest.approx(proj_dist(q, p), abs=1e-12)
        assert dpq <= proj_dist(p, r) + proj_dist(r, q) + 1e-12


def test_ultrametric_axioms():
    rng = random.Random(13)
    for _ in range(10_000):
        p, q, r = (_random_padic_point(rng, 3) for _ in range(3))
        dpq = proj_dist(p, q)
        assert 0.0 <= dpq <= 1.0
        assert dpq == proj_dist(q, p)
        assert dpq <= max(proj_dist(p, r), proj_dist(r, q))


def test_isometric_action():
    rng = np.random.default_rng(17)
    for field in (REAL, COMPLEX):
        for _ in range(500):
            g = rng.normal(size=(3, 3))
            if field is COMPLEX:
                g = g + 1j * rng.normal(size=(3, 3))
            k, _ = np.linalg.qr(g)
            p = ProjPoint(Vector(field, rng.normal(size=3) + (1j * rng.normal(size=3) if field is COMPLEX else 0)))
            q = ProjPoint(Vector(field, rng.normal(size=3) + (1j * rng.normal(size=3) if field is COMPLEX else 0)))
            kp = ProjPoint(Vector(field, k @ p.rep.coords))
            kq = ProjPoint(Vector(field, k @ q.rep.coords))
            assert proj_dist(kp, kq) == pytest.approx(proj_dist(p, q), abs=1e-9)


def _random_slz(rng, n):
    m = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for _ in range(6):
        i, j = rng.sample(range(n), 2)
        lam = rng.randint(-3, 3)
        for c in range(n):
            m[j][c] += lam * m[i][c]
    return m


def test_isometric_action_padic():
    rng = random.Random(19)
    for _ in range(1000):
        k = _random_slz(rng, 3)
        p = _random_padic_point(rng, 3)
        q = _random_padic_point(rng, 3)

        def act(pt):
            coords = [sum((row[c] * pt.rep.coords[c] for c in range(3)), Q5.zero())
                      for row in k]
            return ProjPoint(Vector(Q5, coords))

        assert proj_dist(act(p), act(q)) == proj_dist(p, q)


def test_hyperplane_distance_is_infimum_over_the_hyperplane():
    rng = np.random.default_rng(23)
    for n, samples, slack in ((3, 4000, 0.01), (4, 20000, 0.08)):
        form = rng.normal(size=n)
        point = ProjPoint(Vector(REAL, rng.normal(size=n)))
        h = ProjHyperplane(Vector(REAL, form))
        d = dist_to_hyperplane(point, h)
        # orthonormal kernel basis of the form
        _, _, vt = np.linalg.svd(h.form.coords.reshape(1, -1))
        kernel = vt[1:]
        combos = rng.normal(size=(samples, n - 1)) @ kernel
        best = min(proj_dist(point, ProjPoint(Vector(REAL, c))) for c in combos)
        assert best >= d - 1e-9
        assert best - d <= slack


def test_hyperplane_distance_is_attained_padically():
    h = ProjHyperplane(Vector(Q5, [1, 2, 3]))
    point = ProjPoint(Vector(Q5, [1, 2, 0]))
    d = dist_to_hyperplane(point, h)
    assert d == 0.2
    best = 1.0
    for x2 in range(25):
        for x3 in range(25):
            coords = [Fraction(-(2 * x2 + 3 * x3)), Fraction(x2), Fraction(x3)]
            if not any(coords):
                continue
            best = min(best, proj_dist(point, ProjPoint(Vector(Q5, coords))))
    assert best == d


def test_form_value_is_linear_not_conjugated():
    f = Vector(COMPLEX, [1j, 0])
    v = Vector(COMPLEX, [1j, 0])
    assert form_value(f, v) == pytest.approx(-1 + 0j)
