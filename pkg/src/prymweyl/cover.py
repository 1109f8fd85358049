"""Monodromy data of W-Galois covers of a genus-g curve.

A cover is stored as words for the images of the standard generators
``a_1, b_1, ..., a_g, b_g`` of the surface group and for the local monodromy
around branch points.  Words use 0-based simple-reflection indices in
memory and 1-based indices in the JSON file format.  Products follow the
right-action convention of :mod:`weyl` (letters apply left to right), and
the surface relation reads

    [a_1, b_1] ... [a_g, b_g] * c_1^{n_1} ... = e,   [a, b] = a b a^-1 b^-1.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import CoverError
from .weyl import CERTIFY_LIMIT, word_matrix, word_permutation, words_generate_order


@dataclass(frozen=True)
class CoverDatum:
    family: str
    rank: int
    genus: int
    generators: tuple
    branch: tuple = field(default=())

    @property
    def is_etale(self):
        return not any(count for _, count in self.branch)

    def handle(self, i):
        return self.generators[2 * i], self.generators[2 * i + 1]

    def to_json(self):
        return {
            "family": self.family, "rank": self.rank, "genus": self.genus,
            "generators": [[i + 1 for i in w] for w in self.generators],
            "branch": [{"word": [i + 1 for i in w], "count": c} for w, c in self.branch],
        }

    @classmethod
    def from_json(cls, data):
        try:
            fam, rank, g = str(data["family"]).upper(), int(data["rank"]), int(data["genus"])
            gens = data["generators"]
            branch = data.get("branch", [])
        except (KeyError, TypeError, ValueError) as exc:
            raise CoverError(f"malformed cover description: {exc}") from None
        if g < 0 or len(gens) != 2 * g:
            raise CoverError(f"expected {2 * g} generator words, got {len(gens)}")

        def conv(w):
            if not isinstance(w, list) or not all(isinstance(i, int) for i in w):
                raise CoverError(f"word {w!r} is not a list of integers")
            if any(not 1 <= i <= rank for i in w):
                raise CoverError(f"word {w} uses letters outside 1..{rank}")
            return tuple(i - 1 for i in w)

        br = []
        for b in branch:
            if not isinstance(b, dict) or "word" not in b:
                raise CoverError(f"malformed branch entry {b!r}")
            count = int(b.get("count", 1))
            if count < 0:
                raise CoverError("branch multiplicity must be nonnegative")
            br.append((conv(b["word"]), count))
        return cls(fam, rank, g, tuple(conv(w) for w in gens), tuple(br))


def load_cover(path):
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CoverError(f"{path}: {exc}") from None
    return CoverDatum.from_json(data)


def _check_words(cd, rd):
    if (cd.family, cd.rank) != (rd.family, rd.rank):
        raise CoverError(f"cover is for {cd.family}{cd.rank}, root datum is {rd.name}")
    if len(cd.generators) != 2 * cd.genus:
        raise CoverError("wrong number of generator words")
    for w in list(cd.generators) + [w for w, _ in cd.branch]:
        if any(not 0 <= i < rd.rank for i in w):
            raise CoverError(f"word {w} has letters outside the alphabet")


def _inv(w):
    return tuple(reversed(w))


def relator_word(cd):
    """The surface relator as a single word in the simple reflections."""
    out = []
    for i in range(cd.genus):
        a, b = cd.handle(i)
        out += list(a) + list(b) + list(_inv(a)) + list(_inv(b))
    for w, count in cd.branch:
        out += list(w) * count
    return tuple(out)


def components(perms, d):
    """Orbits of the group generated by permutations of range(d)."""
    parent = list(range(d))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for p in perms:
        for k in range(d):
            ra, rb = find(k), find(p[k])
            if ra != rb:
                parent[ra] = rb
    roots = {}
    for k in range(d):
        roots.setdefault(find(k), []).append(k)
    return sorted(roots.values())


@dataclass(frozen=True)
class ValidationReport:
    relation_holds: bool
    n_components: int
    generation: object  # None when not certifiable

    @property
    def transitive(self):
        return self.n_components == 1

    @property
    def valid(self):
        return self.relation_holds and self.transitive and self.generation is not False

    @property
    def generation_status(self):
        return {True: "certified", False: "fails", None: "unverified"}[self.generation]


def validate_cover(cd, rd, od, certify=True):
    _check_words(cd, rd)
    M = word_matrix(rd, relator_word(cd))
    relation = bool((M == np.eye(rd.rank, dtype=object)).all())
    words = list(cd.generators) + [w for w, c in cd.branch if c]
    perms = [word_permutation(od, w) for w in words]
    ncomp = len(components(perms, od.d))
    gen = None
    if certify and rd.weyl_order <= CERTIFY_LIMIT:
        gen = words_generate_order(rd, words) == rd.weyl_order
    return ValidationReport(relation, ncomp, gen)


def element_order(rd, word):
    M = word_matrix(rd, word)
    I = np.eye(rd.rank, dtype=object)
    P, k = M, 1
    while not (P == I).all():
        P = P.dot(M)
        k += 1
    return k


def cycle_type(perm):
    seen = [False] * len(perm)
    out = []
    for s in range(len(perm)):
        if seen[s]:
            continue
        n, k = 0, s
        while not seen[k]:
            seen[k] = True
            k = perm[k]
            n += 1
        out.append(n)
    return sorted(out, reverse=True)


@dataclass(frozen=True)
class CurveInvariants:
    g_X: int
    g_Y: int
    g_Z: int
    d: int
    weyl_order: int
    rank: int
    etale: bool

    @property
    def dim_jac_Y(self):
        return self.g_Y

    @property
    def dim_prym(self):
        return self.g_Y - self.g_X

    @property
    def dim_P(self):
        """Dimension of the isotypic Prym for an étale cover."""
        return self.rank * (self.g_X - 1) if self.etale else None


def _rh_genus(deg, g, ramification):
    chi2 = deg * (2 * g - 2) + ramification
    if chi2 % 2 or chi2 < -2:
        raise CoverError(f"Riemann-Hurwitz gives non-integral or negative genus "
                         f"(2g-2 = {Fraction(chi2)})")
    return chi2 // 2 + 1


def curve_invariants(cd, od, rd=None):
    rd = rd or od.base
    ram_Y = 0
    ram_Z = Fraction(0)
    for w, count in cd.branch:
        if not count:
            continue
        ct = cycle_type(word_permutation(od, w))
        ram_Y += count * sum(e - 1 for e in ct)
        o = element_order(rd, w)
        ram_Z += count * Fraction(rd.weyl_order * (o - 1), o)
    if ram_Z.denominator != 1:
        raise CoverError("ramification of the Galois closure is not integral")
    gY = _rh_genus(od.d, cd.genus, ram_Y)
    gZ = _rh_genus(rd.weyl_order, cd.genus, int(ram_Z))
    return CurveInvariants(cd.genus, gY, gZ, od.d, rd.weyl_order, rd.rank, cd.is_etale)


@dataclass(frozen=True)
class SearchConfig:
    """Knobs of the random cover search."""

    max_attempts: int = 20000
    strategy: str = "search"
    word_length: int = 0  # 0: twice the number of positive roots
    inner_attempts: int = 500


def _random_word(rng, rd, length):
    L = int(rng.integers(0, length + 1))
    return tuple(int(x) for x in rng.integers(0, rd.rank, size=L))


def _commutator(A, B, Ainv, Binv):
    return A.dot(B).dot(Ainv).dot(Binv)


def _reduce(word):
    out = []
    for a in word:
        if out and out[-1] == a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


def random_etale_cover(rd, g, seed, od, cfg=SearchConfig()):
    """Seeded random étale cover whose monodromy is transitive on the orbit.

    ``search``: draw every handle except ``a_g`` at random, then draw random
    words for ``a_g`` until the relation closes.  ``paired``: choose handles
    so that commutators cancel in pairs, ``(a_2, b_2) = (b_1, a_1)``;
    this needs no search and suits very large groups.
    """
    if g < 1:
        raise CoverError("genus must be at least 1")
    rng = np.random.default_rng(seed)
    length = cfg.word_length or max(4, 2 * rd.n_positive)
    I = np.eye(rd.rank, dtype=object)
    attempts = 0
    while attempts < cfg.max_attempts:
        attempts += 1
        if cfg.strategy == "paired":
            gens = []
            for i in range(0, g - g % 2, 2):
                a, b = _random_word(rng, rd, length), _random_word(rng, rd, length)
                gens += [a, b, b, a]
            if g % 2:
                c = _random_word(rng, rd, length)
                gens += [c, c]
        elif cfg.strategy == "search":
            gens = []
            R = I
            for _ in range(g - 1):
                a, b = _random_word(rng, rd, length), _random_word(rng, rd, length)
                gens += [a, b]
                R = R.dot(_commutator(word_matrix(rd, a), word_matrix(rd, b),
                                      word_matrix(rd, _inv(a)), word_matrix(rd, _inv(b))))
            b = _random_word(rng, rd, length)
            Bm = word_matrix(rd, b)
            # need a b a^-1 = R^-1 b, i.e. a b = R^-1 b a
            target = _rows_inverse(R).dot(Bm)
            found = None
            inner = 0
            while attempts < cfg.max_attempts and inner < cfg.inner_attempts:
                inner += 1
                a = _random_word(rng, rd, length)
                Am = word_matrix(rd, a)
                if (Am.dot(Bm) == target.dot(Am)).all():
                    found = a
                    break
                attempts += 1
            if found is None:
                continue
            gens += [found, b]
        else:
            raise CoverError(f"unknown strategy {cfg.strategy!r}")
        cd = CoverDatum(rd.family, rd.rank, g, tuple(_reduce(w) for w in gens))
        rep = validate_cover(cd, rd, od)
        if rep.valid:
            return cd
    raise CoverError(f"no valid cover found in {cfg.max_attempts} attempts (seed {seed})")


def _rows_inverse(M):
    # reflection-representation matrices have determinant +-1
    from .intlat import unimodular_inverse
    return unimodular_inverse(M)
