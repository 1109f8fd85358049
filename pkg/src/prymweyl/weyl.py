"""Weyl orbits with canonical indexing, stabilizer words and linear characters.

Action convention: W acts on weights on the *right*.  A word ``[i1, i2, ...]``
(0-based simple-reflection indices) sends ``x`` to ``x s_i1 s_i2 ...``, i.e.
the letters are applied left to right.  As matrices on row vectors the word
is ``R_i1 @ R_i2 @ ...``.
"""

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import BoundExceeded, RootSystemError
from .rootsys import check_dominant

CERTIFY_LIMIT = 10**6


@dataclass(frozen=True, eq=False)
class OrbitData:
    """A W-orbit in canonical order.

    ``points[0]`` is the dominant weight.  ``simple_action[i][k]`` is the
    index of ``points[k] s_i``; ``words[k]`` carries ``points[0]`` to
    ``points[k]``.
    """

    base: object
    lam: tuple
    points: tuple
    simple_action: tuple
    words: tuple
    stab_words: tuple
    index: dict = field(repr=False)

    @property
    def d(self):
        return len(self.points)

    @property
    def stab_order(self):
        return self.base.weyl_order // self.d

    def matrix(self):
        """Orbit points as a d x rank object array."""
        return np.array(self.points, dtype=object).reshape(self.d, self.base.rank)


def orbit(rd, lam, bound=10**6):
    """Canonically ordered W-orbit of a nonzero dominant integral weight.

    Breadth-first by level; each level is sorted lexicographically on
    coordinates.  A point's tree parent is its first discovery when the
    previous level is scanned in order and reflections in index order.
    """
    lam = check_dominant(rd, lam)
    if not any(lam):
        raise RootSystemError("orbit of the zero weight is not supported")
    points = [lam]
    index = {lam: 0}
    words = [()]
    level = [lam]
    while level:
        found = {}
        for x in level:
            wx = words[index[x]]
            for i in range(rd.rank):
                if not x[i]:
                    continue
                y = rd.reflect(x, i)
                if y not in index and y not in found:
                    found[y] = wx + (i,)
        level = sorted(found)
        for y in level:
            index[y] = len(points)
            points.append(y)
            words.append(found[y])
            if len(points) > bound:
                raise BoundExceeded("W-orbit size", bound)
    action = tuple(
        tuple(index[rd.reflect(x, i)] for x in points) for i in range(rd.rank)
    )
    stab = []
    seen = set()
    for k in range(len(points)):
        for i in range(rd.rank):
            p = action[i][k]
            w = _free_reduce(words[k] + (i,) + tuple(reversed(words[p])))
            if w and w not in seen:
                seen.add(w)
                stab.append(w)
    if rd.weyl_order % len(points):
        raise RootSystemError("orbit size does not divide the group order")
    return OrbitData(rd, lam, tuple(points), action, tuple(words), tuple(stab), index)


def _free_reduce(word):
    out = []
    for a in word:
        if out and out[-1] == a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


def word_matrix(rd, word):
    """Integer matrix M with ``x @ M == x . word`` for row vectors x."""
    n = rd.rank
    M = np.eye(n, dtype=object)
    for i in word:
        M = M.dot(np.array(rd.reflection_matrix(i), dtype=object))
    return M


def apply_word(rd, x, word):
    for i in word:
        x = rd.reflect(x, i)
    return x


def word_permutation(od, word):
    """Permutation of orbit indices induced by a word (as a tuple)."""
    perm = list(range(od.d))
    for i in word:
        a = od.simple_action[i]
        perm = [a[p] for p in perm]
    return tuple(perm)


def group_order(gens, start, bound=CERTIFY_LIMIT):
    """Size of the orbit of ``start`` under integer matrices ``gens``.

    When ``start`` has trivial stabilizer (e.g. rho) this is the order of
    the generated group.
    """
    gens = _distinct([np.asarray(g, dtype=np.int64) for g in gens])
    start = tuple(int(v) for v in start)
    seen = {start}
    frontier = [start]
    while frontier:
        X = np.array(frontier, dtype=np.int64)
        nxt = []
        for g in gens:
            for row in map(tuple, (X @ g).tolist()):
                if row not in seen:
                    seen.add(row)
                    nxt.append(row)
        if len(seen) > bound:
            raise BoundExceeded("generated subgroup order", bound)
        frontier = nxt
    return len(seen)


def _distinct(mats):
    out, keys = [], set()
    for m in mats:
        k = m.tobytes()
        if k not in keys and not (m == np.eye(m.shape[0], dtype=m.dtype)).all():
            keys.add(k)
            out.append(m)
    return out


def words_generate_order(rd, words, bound=CERTIFY_LIMIT):
    """Order of the subgroup of W generated by words, or None above bound."""
    if rd.weyl_order > bound:
        return None
    return group_order([word_matrix(rd, w) for w in words], rd.rho, bound)


def certify_stabilizer(od):
    """True/False when |W| is small enough to enumerate, else None."""
    order = words_generate_order(od.base, od.stab_words)
    if order is None:
        return None
    return order == od.stab_order


def stabilizes(od, word):
    return apply_word(od.base, od.lam, word) == od.lam


@dataclass(frozen=True)
class LinearCharacter:
    """A homomorphism W -> {+1, -1}, given by its values on simple reflections."""

    signs: tuple

    def __call__(self, word):
        s = 1
        for i in word:
            s *= self.signs[i]
        return s

    @property
    def is_trivial(self):
        return all(s == 1 for s in self.signs)


def odd_bond_components(rd):
    """Components of the Coxeter diagram restricted to bonds of order 3."""
    n = rd.rank
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    C = rd.cartan
    for i in range(n):
        for j in range(i + 1, n):
            if C[i][j] * C[j][i] == 1:
                parent[find(i)] = find(j)
    comps = {}
    for i in range(n):
        comps.setdefault(find(i), []).append(i)
    return sorted(comps.values())


def linear_characters(rd):
    """All 2^k linear characters; simple reflections joined by an odd bond
    are conjugate, so they must take the same sign."""
    comps = odd_bond_components(rd)
    out = []
    for choice in product((1, -1), repeat=len(comps)):
        signs = [1] * rd.rank
        for comp, s in zip(comps, choice):
            for i in comp:
                signs[i] = s
        out.append(LinearCharacter(tuple(signs)))
    return out


def psi_star_injective(od):
    """Whether restriction of linear characters from W to Stab(lam) is injective."""
    for chi in linear_characters(od.base):
        if chi.is_trivial:
            continue
        if all(chi(w) == 1 for w in od.stab_words):
            return False
    return True
