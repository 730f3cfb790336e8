"""Constructing and verifying ping-pong tuples.

The three manufacturing steps turn an epsilon-contracting element and a
separating set F into proximal, very contracting, and very proximal
elements, with certificate parameters given by exact formulas in (r, C,
epsilon).  build_pingpong_tuple runs the inductive construction x_1 =
gamma a_1 h_1, x_i = g_i gamma a_i h_i, selecting h_i, g_i in F by explicit
distance conditions against the previously built transformations.  A valid
certificate implies the x_i freely generate F_m; freeness_falsifier is the
independent brute-force check of that conclusion.
"""

import math
import random as random_
import warnings
from dataclasses import dataclass

import numpy as np

from .cartan import SLMatrix, apply_hyperplane, apply_point, bilip_constant
from .contraction import (
    ContractionCert,
    ProximalCert,
    contraction_coefficient,
    contraction_data,
)
from .errors import ConstructionError, DomainError, NoSeparatorError, PreconditionError
from .fields import Kind
from .projective import ProjPoint, Vector, dist_to_hyperplane
from .separation import SeparatingSet

__all__ = [
    "PingPongCert",
    "ProximalElement",
    "VeryContractingElement",
    "Word",
    "build_pingpong_tuple",
    "certify_free_generators",
    "freeness_falsifier",
    "make_proximal",
    "make_very_contracting",
    "make_very_proximal",
    "separation_table",
    "tighten_very_contracting",
    "verify_pingpong",
]

_PROBE_ATTEMPTS = 32


@dataclass(frozen=True)
class ProximalElement:
    """A transformation together with its proximality certificate."""

    matrix: SLMatrix
    cert: ProximalCert


@dataclass(frozen=True)
class VeryContractingElement:
    """A transformation contracting in both directions, with one
    certificate per direction (common epsilon)."""

    matrix: SLMatrix
    forward: ContractionCert
    backward: ContractionCert

    @property
    def epsilon(self) -> float:
        return max(self.forward.epsilon, self.backward.epsilon)


@dataclass(frozen=True)
class Word:
    """Reduced word in the generators: letters are (index, +-1)."""

    letters: tuple

    def __post_init__(self):
        letters = tuple((int(i), int(e)) for i, e in self.letters)
        object.__setattr__(self, "letters", letters)
        if not letters:
            raise ConstructionError("a word needs at least one letter")
        for i, e in letters:
            if e not in (1, -1) or i < 0:
                raise ConstructionError(f"bad letter ({i}, {e})")
        for (i, e), (j, f) in zip(letters, letters[1:]):
            if i == j and e == -f:
                raise ConstructionError("word is not reduced")

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return " ".join(f"g{i}" if e == 1 else f"g{i}^-1" for i, e in self.letters)


@dataclass(frozen=True)
class PingPongCert:
    """m generators with very-proximal certificates at common parameters
    (r, epsilon) and the recorded cross-separation distances.

    Validity of the distances is checked by verify_pingpong, not at
    construction, so that refutable certificates can exist as data.
    """

    generators: tuple
    certificates: tuple
    r: float
    epsilon: float
    separations: tuple

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "certificates", tuple(self.certificates))
        object.__setattr__(self, "separations", tuple(self.separations))
        if not self.generators:
            raise ConstructionError("a ping-pong tuple needs at least one generator")
        if len(self.generators) != len(self.certificates):
            raise ConstructionError("one certificate per generator is required")
        if not self.r > 2 * self.epsilon > 0:
            raise ConstructionError(
                f"parameters must satisfy r > 2 epsilon > 0, got r = {self.r}, "
                f"epsilon = {self.epsilon}")

    @property
    def m(self) -> int:
        return len(self.generators)


def _own_cert(matrix: SLMatrix, epsilon: float) -> ContractionCert:
    triple = matrix.cartan()
    return ContractionCert(epsilon, triple.attracting_point(),
                           triple.repulsive_hyperplane(), triple.ratio)


def _check_field(g: SLMatrix, F: SeparatingSet):
    if F.elements and (g.field != F.elements[0].field or g.n != F.elements[0].n):
        raise DomainError("element and separating set live over different spaces")


def make_proximal(g: SLMatrix, cert: ContractionCert, F: SeparatingSet) -> ProximalElement:
    """First f in F with d([f] v_g, H_g) > r turns g into the (r, C epsilon)-
    proximal element f g."""
    _check_field(g, F)
    if not cert.epsilon < F.r / (2 * F.C):
        raise PreconditionError(
            f"need epsilon < r/(2C) = {F.r / (2 * F.C)}, got {cert.epsilon}")
    for f in F.elements:
        moved = apply_point(f, cert.attracting)
        if dist_to_hyperplane(moved, cert.repelling) > F.r:
            matrix = f @ g
            forward = ContractionCert(F.C * cert.epsilon, moved, cert.repelling,
                                      matrix.cartan().ratio)
            return ProximalElement(matrix, ProximalCert(F.r, F.C * cert.epsilon,
                                                        forward, None))
    raise NoSeparatorError(
        "no f in F moves the attracting point off the repulsive hyperplane "
        f"by more than r = {F.r}")


def _perturbed(P: ProjPoint, seed: int) -> ProjPoint:
    fld = P.rep.field
    n = len(P.rep)
    if fld.is_padic:
        rng = random_.Random(seed)
        p = fld.prime
        span = p ** max(fld.precision - 2, 1)
        coords = [c + fld.scalar(p * p * rng.randrange(span)) for c in P.rep.coords]
        return ProjPoint(Vector(fld, coords))
    rng = np.random.default_rng(seed)
    noise = rng.normal(size=n) * 1e-2
    if fld.kind is Kind.COMPLEX:
        noise = noise + 1j * rng.normal(size=n) * 1e-2
    return ProjPoint(Vector(fld, P.rep.coords + noise))


def make_very_contracting(g: SLMatrix, cert: ContractionCert, F: SeparatingSet,
                          seed: int = 0) -> VeryContractingElement:
    """g f g^-1 for the first f in F clearing both probe conditions.

    The probe point u is the attracting point of g^-1 under seed-
    deterministic perturbation, retried when no f qualifies.  Both output
    certificates carry epsilon' = sqrt(2Cd) epsilon / r with the conjugate's
    own Cartan flags.
    """
    _check_field(g, F)
    d_const = float(g.field.d)
    if not cert.epsilon < F.r / math.sqrt(2 * F.C * d_const):
        raise PreconditionError(
            f"need epsilon < r/sqrt(2Cd) = {F.r / math.sqrt(2 * F.C * d_const)}, "
            f"got {cert.epsilon}")
    eps_out = math.sqrt(2 * F.C * d_const) * cert.epsilon / F.r
    ginv = g.inverse()
    anchor = ginv.cartan().attracting_point()
    H = cert.repelling
    for attempt in range(_PROBE_ATTEMPTS):
        u = _perturbed(anchor, seed + attempt)
        pulled = apply_point(ginv, u)
        for f in F.elements:
            if (dist_to_hyperplane(apply_point(f, pulled), H) > F.r
                    and dist_to_hyperplane(apply_point(f.inverse(), pulled), H) > F.r):
                matrix = g @ f @ ginv
                return VeryContractingElement(matrix, _own_cert(matrix, eps_out),
                                              _own_cert(matrix.inverse(), eps_out))
    raise NoSeparatorError(
        f"no f in F cleared both probe conditions after {_PROBE_ATTEMPTS} probes")


def make_very_proximal(g: SLMatrix, forward: ContractionCert,
                       backward: ContractionCert, F: SeparatingSet) -> ProximalElement:
    """g f for the first f in F moving both flags: the result is
    (r/C, C epsilon)-very proximal."""
    _check_field(g, F)
    eps = max(forward.epsilon, backward.epsilon)
    if not eps < F.r / (2 * F.C ** 2):
        raise PreconditionError(
            f"need epsilon < r/(2C^2) = {F.r / (2 * F.C ** 2)}, got {eps}")
    for f in F.elements:
        if (dist_to_hyperplane(apply_point(f, forward.attracting), forward.repelling) > F.r
                and dist_to_hyperplane(apply_point(f.inverse(), backward.attracting),
                                       backward.repelling) > F.r):
            matrix = g @ f
            inv = matrix.inverse()
            fwd = ContractionCert(F.C * eps, forward.attracting,
                                  apply_hyperplane(f.inverse(), forward.repelling),
                                  matrix.cartan().ratio)
            bwd = ContractionCert(F.C * eps,
                                  apply_point(f.inverse(), backward.attracting),
                                  backward.repelling, inv.cartan().ratio)
            return ProximalElement(matrix, ProximalCert(F.r / F.C, F.C * eps, fwd, bwd))
    raise NoSeparatorError(
        "no f in F moves both attracting points off the repulsive hyperplanes "
        f"by more than r = {F.r}")


def tighten_very_contracting(element: VeryContractingElement) -> VeryContractingElement:
    """Replace the declared epsilon by the element's own contraction
    coefficient when that is smaller, keeping own-Cartan flags.

    The formula epsilon of the manufacturing step is often far above what
    the constructed matrix actually achieves; downstream preconditions only
    get easier with the smaller value.
    """
    own = max(contraction_coefficient(element.matrix),
              contraction_coefficient(element.matrix.inverse()))
    if own >= min(0.25, element.epsilon):
        return element
    return VeryContractingElement(element.matrix, _own_cert(element.matrix, own),
                                  _own_cert(element.matrix.inverse(), own))


def separation_table(certificates) -> tuple:
    """Cross distances ((i, si), (j, sj), d) between attracting points of
    x_i^(si) and repulsive hyperplanes of x_j^(sj), ordered pairs i != j."""
    entries = []
    for i, ci in enumerate(certificates):
        for j, cj in enumerate(certificates):
            if i == j:
                continue
            for si, attr in ((1, ci.forward), (-1, ci.backward)):
                for sj, rep in ((1, cj.forward), (-1, cj.backward)):
                    entries.append(((i, si), (j, sj),
                                    dist_to_hyperplane(attr.attracting, rep.repelling)))
    return tuple(entries)


def build_pingpong_tuple(a, F: SeparatingSet, gamma: VeryContractingElement) -> PingPongCert:
    """Inductive assembly of the m-tuple x_1 = gamma a_1 h_1,
    x_i = g_i gamma a_i h_i with h_i, g_i selected from F.

    All certificates are issued at the common parameters (r/c, c^3 epsilon),
    c the largest bi-Lipschitz constant over the a_i and F.
    """
    a = tuple(a)
    if not a:
        raise DomainError("need at least one base element")
    for ai in a:
        _check_field(ai, F)
    c = max([F.C] + [bilip_constant(ai) for ai in a])
    eps = gamma.epsilon
    if not eps < F.r / (2 * c ** 4):
        raise PreconditionError(
            f"need epsilon < r/(2c^4) = {F.r / (2 * c ** 4)} with c = {c}, got {eps}")
    if bilip_constant(gamma.matrix) > c * (1 + 1e-12):
        warnings.warn(
            "the very contracting element's bi-Lipschitz constant "
            f"{bilip_constant(gamma.matrix)} exceeds c = {c}; the constant c "
            "only ranges over the base elements and F", UserWarning)
    r = F.r
    r_bar = r / c
    eps_bar = c ** 3 * eps

    generators = []
    certificates = []

    def record(matrix, fwd_attr, fwd_rep, bwd_attr, bwd_rep):
        fwd = ContractionCert(eps_bar, fwd_attr, fwd_rep, matrix.cartan().ratio)
        bwd = ContractionCert(eps_bar, bwd_attr, bwd_rep, matrix.inverse().cartan().ratio)
        generators.append(matrix)
        certificates.append(ProximalCert(r_bar, eps_bar, fwd, bwd))

    for i, ai in enumerate(a):
        b = gamma.matrix @ ai
        ai_inv = ai.inverse()
        v_b = gamma.forward.attracting
        H_b = apply_hyperplane(ai_inv, gamma.forward.repelling)
        v_binv = apply_point(ai_inv, gamma.backward.attracting)
        H_binv = gamma.backward.repelling
        prev_reps = [side.repelling for pc in certificates
                     for side in (pc.forward, pc.backward)]
        prev_attrs = [side.attracting for pc in certificates
                      for side in (pc.forward, pc.backward)]

        if i == 0:
            h = _select(F, "h_1", (
                ("d([h] v, H) > r for the attracting data of gamma a_1",
                 lambda f: dist_to_hyperplane(apply_point(f, v_b), H_b) > r),
                ("d([h^-1] v', H') > r for the attracting data of (gamma a_1)^-1",
                 lambda f: dist_to_hyperplane(apply_point(f.inverse(), v_binv), H_binv) > r),
            ))
            record(b @ h, v_b, apply_hyperplane(h.inverse(), H_b),
                   apply_point(h.inverse(), v_binv), H_binv)
            continue

        h = _select(F, f"h_{i + 1}", (
            ("h^-1 maps the attracting point of (gamma a_i)^-1 at distance > r "
             "from the repulsive hyperplanes of the previous x_j",
             lambda f: all(dist_to_hyperplane(apply_point(f.inverse(), v_binv), rep) > r
                           for rep in prev_reps)),
            ("h maps the previous attracting points at distance > r from the "
             "repulsive hyperplane of gamma a_i",
             lambda f: all(dist_to_hyperplane(apply_point(f, attr), H_b) > r
                           for attr in prev_attrs)),
        ))
        bh = b @ h
        H_bh = apply_hyperplane(h.inverse(), H_b)
        v_bhinv = apply_point(h.inverse(), v_binv)
        g_i = _select(F, f"g_{i + 1}", (
            ("g maps the attracting point of gamma a_i h_i at distance > r from "
             "the previous repulsive hyperplanes and from its own",
             lambda f: all(dist_to_hyperplane(apply_point(f, v_b), rep) > r
                           for rep in prev_reps + [H_bh])),
            ("g^-1 maps the previous attracting points at distance > r from the "
             "repulsive hyperplane of (gamma a_i h_i)^-1",
             lambda f: all(dist_to_hyperplane(apply_point(f.inverse(), attr), H_binv) > r
                           for attr in prev_attrs)),
            ("g^-1 maps the attracting point of (gamma a_i h_i)^-1 at distance "
             "> r from the repulsive hyperplane of (gamma a_i h_i)^-1",
             lambda f: dist_to_hyperplane(apply_point(f.inverse(), v_bhinv), H_binv) > r),
        ))
        record(g_i @ bh, apply_point(g_i, v_b), H_bh,
               v_bhinv, apply_hyperplane(g_i, H_binv))

    return PingPongCert(tuple(generators), tuple(certificates), r_bar, eps_bar,
                        separation_table(certificates))


def certify_free_generators(a, F: SeparatingSet, gamma0: SLMatrix,
                            seed: int = 0) -> PingPongCert:
    """Full pipeline: certify gamma0 as contracting, conjugate it into a very
    contracting element, tighten, and run the tuple construction over a."""
    cert0 = contraction_data(gamma0)
    vc = make_very_contracting(gamma0, cert0, F, seed=seed)
    vc = tighten_very_contracting(vc)
    return build_pingpong_tuple(a, F, vc)


def _select(F: SeparatingSet, name: str, conditions):
    """First f in F satisfying every condition; on failure, report which
    condition eliminated how many candidates."""
    failures = [0] * len(conditions)
    for f in F.elements:
        for idx, (_, test) in enumerate(conditions):
            if not test(f):
                failures[idx] += 1
                break
        else:
            return f
    detail = "; ".join(f"{fails} candidates failed: {text}"
                       for (text, _), fails in zip(conditions, failures) if fails)
    raise NoSeparatorError(f"selection of {name} failed ({detail})")


def verify_pingpong(cert: PingPongCert, tolerance: float = 1e-9) -> bool:
    """Recompute all flag and cross-separation distances from the stored
    certificate data.

    Archimedean inequalities must clear r by the tolerance; distances over a
    p-adic field are exact powers of p and are compared against r with only
    a 1e-12 relative allowance for the float arithmetic that produced r.
    """
    if not cert.r > 2 * cert.epsilon:
        return False
    fld = cert.generators[0].field
    if fld.is_padic:
        threshold = cert.r * (1 - 1e-12)
    else:
        threshold = cert.r + tolerance

    for pc in cert.certificates:
        if pc.backward is None:
            return False
        if pc.forward.flag_distance() < threshold:
            return False
        if pc.backward.flag_distance() < threshold:
            return False
    for i, ci in enumerate(cert.certificates):
        for j, cj in enumerate(cert.certificates):
            if i == j:
                continue
            for attr_side in (ci.forward, ci.backward):
                for rep_side in (cj.forward, cj.backward):
                    if dist_to_hyperplane(attr_side.attracting,
                                          rep_side.repelling) < threshold:
                        return False
    return True


def _is_projective_identity(matrix: SLMatrix) -> bool:
    n = matrix.n
    if matrix.field.is_padic:
        diag = matrix.entries[0][0]
        for i in range(n):
            for j in range(n):
                if i == j:
                    if matrix.entries[i][j] != diag:
                        return False
                elif matrix.entries[i][j]:
                    return False
        return True
    arr = np.asarray(matrix.entries)
    lam = np.trace(arr) / n
    return float(np.max(np.abs(arr - lam * np.eye(n)))) <= 1e-7 * float(np.max(np.abs(arr)))


def freeness_falsifier(gens, max_len: int):
    """Breadth-first search for a reduced word acting as the projective
    identity; None when every word up to max_len acts nontrivially.

    Letters are ordered (0,+1) < (0,-1) < (1,+1) < ..., so the returned
    word is the first counterexample in length-then-lexicographic order.
    """
    if max_len < 1:
        raise DomainError(f"need max_len >= 1, got {max_len}")
    gens = tuple(gens)
    if not gens:
        raise DomainError("need at least one generator")
    letters = []
    mats = {}
    for idx, g in enumerate(gens):
        letters.append((idx, 1))
        letters.append((idx, -1))
        mats[(idx, 1)] = g
        mats[(idx, -1)] = g.inverse()
    frontier = []
    for letter in letters:
        m = mats[letter]
        if _is_projective_identity(m):
            return Word((letter,))
        frontier.append(((letter,), m))
    for _ in range(max_len - 1):
        grown = []
        for word, matrix in frontier:
            last_i, last_e = word[-1]
            for letter in letters:
                if letter[0] == last_i and letter[1] == -last_e:
                    continue
                extended = matrix @ mats[letter]
                if _is_projective_identity(extended):
                    return Word(word + (letter,))
                grown.append((word + (letter,), extended))
        frontier = grown
    return None
