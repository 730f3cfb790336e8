"""Separating sets over projective space.

A finite set F of projective transformations is (m, r)-separating when for
any choice of at most 2m points and 2m hyperplanes some gamma in F moves, in
both directions, every point to distance > r from every hyperplane.  The
exact per-configuration MaxMin oracle is best_separator; estimate_radius
Monte-Carlo-samples configurations, alternating purely random ones with
adversarial ones whose hyperplanes pass through orbit points, and reports
the worst margin seen.  The global infimum r exists by compactness but is
never computed; downstream constructions only ever query concrete
configurations.
"""

import math
import warnings
import random as random_
from dataclasses import dataclass, field as derived_field

import numpy as np

from .cartan import SLMatrix, apply_point, bilip_constant
from .errors import ConstructionError, DomainError
from .projective import ProjHyperplane, ProjPoint, Vector, dist_to_hyperplane

__all__ = [
    "Configuration",
    "NotSeparatingWarning",
    "SeparatingSet",
    "best_separator",
    "estimate_radius",
    "greedy_separating_set",
    "sample_configuration",
    "verify_separating_for",
]

# margins this small on archimedean samples are roundoff residue of an
# exact incidence, not genuine separation
_ZERO_MARGIN = 1e-12


class NotSeparatingWarning(UserWarning):
    """Sampled configuration that no element of the candidate set separates."""


@dataclass(frozen=True)
class SeparatingSet:
    """Candidate set with declared margin r and derived bi-Lipschitz bound C."""

    elements: tuple
    m: int
    r: float
    C: float = derived_field(init=False)

    def __post_init__(self):
        elements = tuple(self.elements)
        object.__setattr__(self, "elements", elements)
        if not (isinstance(self.m, int) and self.m >= 1):
            raise ConstructionError(f"m must be a positive integer, got {self.m!r}")
        if not self.r > 0:
            raise ConstructionError(f"separation radius must be positive, got {self.r}")
        for g in elements[1:]:
            if g.field != elements[0].field or g.n != elements[0].n:
                raise ConstructionError("all separating-set elements must share one field and size")
        object.__setattr__(
            self, "C", max((bilip_constant(g) for g in elements), default=1.0))


@dataclass(frozen=True)
class Configuration:
    points: tuple
    hyperplanes: tuple

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "hyperplanes", tuple(self.hyperplanes))


def _margin(g: SLMatrix, cfg: Configuration) -> float:
    """min over configuration pairs of d(g v, H) and d(g^-1 v, H)."""
    worst = math.inf
    if g.field.is_archimedean:
        # distances are representative-independent, so skip canonicalization:
        # stored reps and forms are unit vectors, d = |f(img)| / ||img||
        n = g.n
        rng_n = range(n)
        mats = (np.asarray(g.entries).tolist(), np.asarray(g.inverse().entries).tolist())
        forms = [H.form.coords.tolist() for H in cfg.hyperplanes]
        for v in cfg.points:
            vc = v.rep.coords.tolist()
            for mat in mats:
                img = [sum(mat[i][j] * vc[j] for j in rng_n) for i in rng_n]
                nrm = math.sqrt(sum(abs(x) ** 2 for x in img))
                for f in forms:
                    d = abs(sum(f[k] * img[k] for k in rng_n)) / nrm
                    if d < worst:
                        worst = d
                        if worst == 0.0:
                            return 0.0
        return worst
    ginv = g.inverse()
    for v in cfg.points:
        images = (apply_point(g, v), apply_point(ginv, v))
        for H in cfg.hyperplanes:
            for img in images:
                worst = min(worst, dist_to_hyperplane(img, H))
                if worst == 0.0:
                    return 0.0
    return worst


def best_separator(F: SeparatingSet, cfg: Configuration):
    """The element of F with the largest configuration margin, and that margin.

    Ties are broken by list order.  The margin is the min over all points v,
    hyperplanes H of the configuration of d(gamma v, H) and d(gamma^-1 v, H);
    an empty configuration has margin +inf vacuously.
    """
    if not F.elements:
        raise DomainError("cannot separate with an empty candidate set")
    if len(cfg.points) > 2 * F.m or len(cfg.hyperplanes) > 2 * F.m:
        raise DomainError(
            f"configuration exceeds the 2m = {2 * F.m} size bound: "
            f"{len(cfg.points)} points, {len(cfg.hyperplanes)} hyperplanes")
    best = None
    best_margin = -math.inf
    for g in F.elements:
        margin = _margin(g, cfg)
        if margin > best_margin:
            best, best_margin = g, margin
    return best, best_margin


def verify_separating_for(F: SeparatingSet, cfg: Configuration) -> bool:
    """True iff some element beats the declared radius on this configuration.

    The inequality is strict: a boundary margin equal to F.r fails.
    """
    _, margin = best_separator(F, cfg)
    return margin > F.r


def _deflate_form_arch(u, w):
    # subtract the pivot component so the form vanishes on u exactly
    k0 = int(np.argmax(np.abs(u)))
    f = np.array(w, copy=True)
    f[k0] -= (w @ u) / u[k0]
    if np.linalg.norm(f) <= 1e-9 * np.linalg.norm(w):
        f = np.zeros_like(u)
        k1 = (k0 + 1) % len(u)
        f[k1] = 1.0
        f[k0] = -u[k1] / u[k0]
    return f


def _deflate_form_padic(field, u, w):
    k0 = next(i for i, c in enumerate(u) if c.valuation == 0)
    f = list(w)
    total = sum((w[i] * u[i] for i in range(len(u))), field.zero())
    f[k0] = f[k0] - total / u[k0]
    if not any(f):
        f = [field.zero()] * len(u)
        k1 = (k0 + 1) % len(u)
        f[k1] = field.one()
        f[k0] = -u[k1] / u[k0]
    return f


def _random_padic_coords(rng, field, n):
    bound = field.prime ** field.precision
    while True:
        coords = [rng.randrange(bound) for _ in range(n)]
        if any(c % field.prime for c in coords):
            return coords


def sample_configuration(elements, m: int, trial: int, seed: int) -> Configuration:
    """Deterministic configuration for one Monte-Carlo trial.

    Even trials draw 2m random points and 2m random hyperplanes.  Odd trials
    are adversarial: the hyperplanes are constructed to pass exactly through
    the images of the sampled points under one candidate, cycled round-robin
    over the candidate list, so that candidate is pinned to margin 0.
    """
    elements = tuple(elements)
    if not elements:
        raise DomainError("configuration sampling needs at least one candidate element")
    fld = elements[0].field
    n = elements[0].n
    adversary = None
    if trial % 2 == 1:
        adversary = elements[(trial // 2) % len(elements)]
    if fld.is_padic:
        rng = random_.Random(seed + trial)
        points = [ProjPoint(Vector(fld, _random_padic_coords(rng, fld, n)))
                  for _ in range(2 * m)]
        raw_forms = [[fld.scalar(x) for x in _random_padic_coords(rng, fld, n)]
                     for _ in range(2 * m)]
        if adversary is None:
            hyperplanes = [ProjHyperplane(Vector(fld, w)) for w in raw_forms]
        else:
            hyperplanes = []
            for j, w in enumerate(raw_forms):
                u = apply_point(adversary, points[j]).rep.coords
                hyperplanes.append(ProjHyperplane(Vector(fld, _deflate_form_padic(fld, u, w))))
        return Configuration(points, hyperplanes)
    rng = np.random.default_rng(seed + trial)
    shape = (2 * m, n)
    pts = rng.normal(size=shape)
    forms = rng.normal(size=shape)
    if fld.is_archimedean and fld.kind.value == "complex":
        pts = pts + 1j * rng.normal(size=shape)
        forms = forms + 1j * rng.normal(size=shape)
    points = [ProjPoint(Vector(fld, row)) for row in pts]
    if adversary is None:
        hyperplanes = [ProjHyperplane(Vector(fld, row)) for row in forms]
    else:
        hyperplanes = []
        for j in range(2 * m):
            u = apply_point(adversary, points[j]).rep.coords
            hyperplanes.append(ProjHyperplane(Vector(fld, _deflate_form_arch(u, forms[j]))))
    return Configuration(points, hyperplanes)


def estimate_radius(elements, m: int, trials: int, seed: int) -> float:
    """Worst best_separator margin over sampled configurations.

    This is an upper estimate of the true separation radius, reported as
    estimated rather than certified.  Returns 0.0 and emits
    NotSeparatingWarning as soon as some sampled configuration defeats every
    candidate, which is sampled evidence the set is not separating at this m.
    """
    elements = tuple(elements)
    if not elements:
        raise DomainError("cannot estimate a separation radius for an empty set")
    if trials < 1:
        raise DomainError(f"need at least one trial, got {trials}")
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    zero_tol = 0.0 if elements[0].field.is_padic else _ZERO_MARGIN
    worst = math.inf
    for t in range(trials):
        cfg = sample_configuration(elements, m, t, seed)
        margin = max(_margin(g, cfg) for g in elements)
        if margin <= zero_tol:
            warnings.warn(
                "a sampled configuration defeats every candidate; "
                "the set is not separating for this m", NotSeparatingWarning)
            return 0.0
        worst = min(worst, margin)
    return worst


def _reduced_words(generators, max_len):
    """Products of reduced words over generators and inverses, length 1..max_len."""
    gens = list(generators)
    letters = [(i, +1) for i in range(len(gens))] + [(i, -1) for i in range(len(gens))]
    mats = {(i, +1): g for i, g in enumerate(gens)}
    mats.update({(i, -1): g.inverse() for i, g in enumerate(gens)})
    out = []
    frontier = [((letter,), mats[letter]) for letter in letters]
    out.extend(matrix for _, matrix in frontier)
    for _ in range(max_len - 1):
        grown = []
        for word, matrix in frontier:
            last_i, last_e = word[-1]
            for letter in letters:
                if letter == (last_i, -last_e):
                    continue
                grown.append((word + (letter,), matrix @ mats[letter]))
        frontier = grown
        out.extend(matrix for _, matrix in frontier)
    return out


def _dedupe(matrices):
    seen = set()
    unique = []
    for g in matrices:
        if g.field.is_padic:
            key = tuple(c.value for row in g.entries for c in row)
        else:
            key = tuple(np.round(np.asarray(g.entries), 9).ravel().tolist())
        if key not in seen:
            seen.add(key)
            unique.append(g)
    return unique


def greedy_separating_set(generators, m: int, target_r: float, trials: int,
                          seed: int, max_word_len: int = 3,
                          max_size: int = 24) -> SeparatingSet:
    """Heuristic candidate-set builder: grow F from short words until the
    estimated radius reaches target_r or nothing improves.

    The result is not certified; the declared r is the final estimate.
    """
    pool = _dedupe(_reduced_words(generators, max_word_len))
    if not pool:
        raise DomainError("word pool is empty; need at least one generator")
    chosen = []
    current = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NotSeparatingWarning)
        # a lone candidate is always defeated by the adversarial trials that
        # cycle to it, so the search must start from the best pair
        for i, a in enumerate(pool):
            for b in pool[i + 1:]:
                value = estimate_radius([a, b], m, trials, seed)
                if value > current:
                    current, chosen = value, [a, b]
        while len(chosen) < max_size and current < target_r:
            best_gain, best_candidate = current, None
            for candidate in pool:
                if candidate in chosen:
                    continue
                value = estimate_radius(chosen + [candidate], m, trials, seed)
                if value > best_gain:
                    best_gain, best_candidate = value, candidate
            if best_candidate is None:
                break
            chosen.append(best_candidate)
            current = best_gain
    if current <= 0.0:
        raise DomainError(
            "greedy search found no separating candidate set; enlarge the word pool")
    return SeparatingSet(tuple(chosen), m, current)
