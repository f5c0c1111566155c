"""Simplicial realization, integer chains, and homology.

A k-simplex of the m-fold interval power is an m-tuple of monotone
maps [k] -> {0,1}, stored as thresholds: t means the map is 1 from
vertex t onward, so t ranges over 0..k+1 and pointwise minimum is
componentwise maximum of thresholds.  A formal product acts on these
tuples coordinate-by-coordinate, which realizes a cubical set as a
simplicial set one level at a time.

Homology is computed from normalized chains (nondegenerate bases,
faces landing on degenerate simplices dropped) by exact integer
Smith reduction.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

from .errors import InputError
from .presheaf import (
    PresheafMap,
    SkeletalPresheaf,
    _UnionFind,
    generator_morphisms,
)
from .report import Report
from .site import Const, Morphism, SiteTag, compose, enumerate_hom


# -- the interval-power action -----------------------------------------------


def simplices(m: int, k: int):
    """All k-simplices of the m-fold interval power."""
    return itertools.product(range(k + 2), repeat=m)


def face_threshold(t: int, i: int) -> int:
    return t - 1 if t > i else t


def degeneracy_threshold(t: int, j: int) -> int:
    return t + 1 if t > j else t


def simplex_face(s: tuple, i: int) -> tuple:
    return tuple(face_threshold(t, i) for t in s)


def simplex_degeneracy(s: tuple, j: int) -> tuple:
    return tuple(degeneracy_threshold(t, j) for t in s)


def act_on_cube(f: Morphism, k: int):
    """The k-simplex action of a formal product: constants become
    constant maps, conjunctions pointwise minima."""
    entries = f.entries

    def act(s: tuple) -> tuple:
        out = []
        for e in entries:
            if isinstance(e, Const):
                out.append(0 if e.bit == 1 else k + 1)
            else:
                out.append(max(s[sym - 1] for sym in e.symbols))
        return tuple(out)

    return act


def verify_act_naturality(m_max: int = 2, n_max: int = 2,
                          k_max: int = 3) -> Report:
    """Functoriality of the action and compatibility with the
    simplicial operators, exhaustively at small sizes."""
    report = Report("interval-power action")
    dims = range(max(m_max, n_max) + 1)
    functorial = True
    for m in range(m_max + 1):
        for p in dims:
            for n in range(n_max + 1):
                for f in enumerate_hom(m, p, SiteTag.QSIGMA):
                    for g in enumerate_hom(p, n, SiteTag.QSIGMA):
                        gf = compose(g, f)
                        for k in range(k_max + 1):
                            a_f = act_on_cube(f, k)
                            a_g = act_on_cube(g, k)
                            a_gf = act_on_cube(gf, k)
                            for s in simplices(m, k):
                                if a_gf(s) != a_g(a_f(s)):
                                    functorial = False
    report.check("action is functorial", functorial)

    commutes = True
    for m in range(m_max + 1):
        for n in range(n_max + 1):
            for f in enumerate_hom(m, n, SiteTag.QSIGMA):
                for k in range(1, k_max + 1):
                    hi, lo = act_on_cube(f, k), act_on_cube(f, k - 1)
                    for s in simplices(m, k):
                        for i in range(k + 1):
                            if simplex_face(hi(s), i) != lo(simplex_face(s, i)):
                                commutes = False
                for k in range(k_max):
                    lo, hi = act_on_cube(f, k), act_on_cube(f, k + 1)
                    for s in simplices(m, k):
                        for j in range(k + 1):
                            if (simplex_degeneracy(lo(s), j)
                                    != hi(simplex_degeneracy(s, j))):
                                commutes = False
    report.check("action commutes with faces and degeneracies", commutes)
    return report


# -- simplicial sets ---------------------------------------------------------


@dataclass
class SimplicialSet:
    """Finite levels with face and degeneracy tables.

    faces[(k, i)] maps level k to level k-1 (0 <= i <= k);
    degeneracies[(k, j)] maps level k to level k+1 (0 <= j <= k).
    """

    K: int
    levels: dict[int, tuple]
    faces: dict[tuple, dict]
    degeneracies: dict[tuple, dict]
    name: str = "S"

    def face(self, k: int, i: int, s: str) -> str:
        return self.faces[(k, i)][s]

    def degeneracy(self, k: int, j: int, s: str) -> str:
        return self.degeneracies[(k, j)][s]

    def is_degenerate(self, k: int, s: str) -> bool:
        # s = s_j(y) forces y = d_{j+1}(s), so testing the round trip
        # over all j decides degeneracy
        for j in range(k):
            if self.degeneracy(k - 1, j, self.face(k, j + 1, s)) == s:
                return True
        return False

    def nondegenerate(self, k: int) -> tuple:
        return tuple(s for s in self.levels[k] if not self.is_degenerate(k, s))

    def size(self) -> dict:
        return {k: len(self.levels[k]) for k in range(self.K + 1)}

    def verify_identities(self) -> Report:
        """The five simplicial identity families at stored levels."""
        report = Report(f"simplicial identities for {self.name}")
        ok_dd = ok_ss = ok_ds = True
        for k in range(2, self.K + 1):
            for j in range(k + 1):
                for i in range(j):
                    for s in self.levels[k]:
                        lhs = self.face(k - 1, i, self.face(k, j, s))
                        rhs = self.face(k - 1, j - 1, self.face(k, i, s))
                        if lhs != rhs:
                            ok_dd = False
        for k in range(self.K - 1):
            for i in range(k + 1):
                for j in range(i, k + 1):
                    for s in self.levels[k]:
                        lhs = self.degeneracy(k + 1, i, self.degeneracy(k, j, s))
                        rhs = self.degeneracy(k + 1, j + 1, self.degeneracy(k, i, s))
                        if lhs != rhs:
                            ok_ss = False
        for k in range(self.K):
            for j in range(k + 1):
                for s in self.levels[k]:
                    up = self.degeneracy(k, j, s)
                    for i in range(k + 2):
                        got = self.face(k + 1, i, up)
                        if i == j or i == j + 1:
                            want = s
                        elif i < j:
                            want = self.degeneracy(k - 1, j - 1, self.face(k, i, s))
                        else:
                            want = self.degeneracy(k - 1, j, self.face(k, i - 1, s))
                        if got != want:
                            ok_ds = False
        report.check("faces commute", ok_dd)
        report.check("degeneracies commute", ok_ss)
        report.check("faces past degeneracies", ok_ds)
        return report


def _threshold_id(s: tuple) -> str:
    return ",".join(str(t) for t in s) if s else "pt"


def delta1_power(m: int, K: int) -> SimplicialSet:
    """The m-fold interval power as an explicit simplicial set."""
    levels = {k: tuple(_threshold_id(s) for s in simplices(m, k))
              for k in range(K + 1)}
    faces = {}
    degeneracies = {}
    for k in range(1, K + 1):
        for i in range(k + 1):
            faces[(k, i)] = {
                _threshold_id(s): _threshold_id(simplex_face(s, i))
                for s in simplices(m, k)
            }
    for k in range(K):
        for j in range(k + 1):
            degeneracies[(k, j)] = {
                _threshold_id(s): _threshold_id(simplex_degeneracy(s, j))
                for s in simplices(m, k)
            }
    return SimplicialSet(K, levels, faces, degeneracies, name=f"D1^{m}")


@dataclass
class SimplicialMap:
    src: SimplicialSet
    dst: SimplicialSet
    mapping: dict[int, dict[str, str]]

    def is_injective(self) -> bool:
        return all(len(set(m.values())) == len(m) for m in self.mapping.values())

    def is_bijective(self) -> bool:
        return self.is_injective() and all(
            set(self.mapping[k].values()) == set(self.dst.levels[k])
            for k in self.mapping
        )

    def verify_simplicial(self) -> bool:
        K = min(self.src.K, self.dst.K)
        for k in range(1, K + 1):
            for i in range(k + 1):
                for s in self.src.levels[k]:
                    lhs = self.dst.face(k, i, self.mapping[k][s])
                    if lhs != self.mapping[k - 1][self.src.face(k, i, s)]:
                        return False
        for k in range(K):
            for j in range(k + 1):
                for s in self.src.levels[k]:
                    lhs = self.dst.degeneracy(k, j, self.mapping[k][s])
                    if lhs != self.mapping[k + 1][self.src.degeneracy(k, j, s)]:
                        return False
        return True


# -- realization -------------------------------------------------------------


def realize(X: SkeletalPresheaf, up_to: int | None = None) -> SimplicialSet:
    """The simplicial set of a stored cubical set.

    Level k glues one copy of the interval-power simplices per
    section: a simplex in the copy of a pushforward X(f)(x) is the
    f-image of the same simplex in the copy of x.  Levels run to
    N + 1, where everything is degenerate (each copy contributes
    nondegenerate simplices only up to its own dimension).
    """
    K = X.N + 1 if up_to is None else up_to
    class_of = _realize_classes(X, K)
    # the same id string can name different classes at different
    # levels (thresholds print alike), so representatives are keyed by
    # both level and id
    found: dict[int, set] = {k: set() for k in range(K + 1)}
    reps: dict[tuple, tuple] = {}
    for (k, n, x, s), cid in class_of.items():
        found[k].add(cid)
        prev = reps.get((k, cid))
        if prev is None or (n, x, s) < prev:
            reps[(k, cid)] = (n, x, s)
    levels = {k: tuple(sorted(found[k])) for k in range(K + 1)}
    faces = {}
    degeneracies = {}
    for k in range(1, K + 1):
        for i in range(k + 1):
            tab = {}
            for cid in levels[k]:
                n, x, s = reps[(k, cid)]
                tab[cid] = class_of[(k - 1, n, x, simplex_face(s, i))]
            faces[(k, i)] = tab
    for k in range(K):
        for j in range(k + 1):
            tab = {}
            for cid in levels[k]:
                n, x, s = reps[(k, cid)]
                tab[cid] = class_of[(k + 1, n, x, simplex_degeneracy(s, j))]
            degeneracies[(k, j)] = tab
    S = SimplicialSet(K, levels, faces, degeneracies, name=f"|{X.name}|")
    if up_to is None:
        assert not S.nondegenerate(K), "top realization level not degenerate"
    return S


def realize_map(u: PresheafMap, S_src: SimplicialSet | None = None,
                S_dst: SimplicialSet | None = None) -> SimplicialMap:
    """Realization of a presheaf map: rename the copy, keep the simplex."""
    S_src = S_src if S_src is not None else realize(u.src)
    S_dst = S_dst if S_dst is not None else realize(u.dst)
    # recompute the class tables of both sides to place members
    src_classes = _realize_classes(u.src, S_src.K)
    dst_classes = _realize_classes(u.dst, S_dst.K)
    mapping: dict[int, dict[str, str]] = {k: {} for k in range(S_src.K + 1)}
    for (k, n, x, s), cid in src_classes.items():
        val = dst_classes[(k, n, u.mapping[n][x], s)]
        assert mapping[k].setdefault(cid, val) == val
    return SimplicialMap(S_src, S_dst, mapping)


def _realize_classes(X: SkeletalPresheaf, K: int) -> dict:
    """Level-tagged class table of the realization (same glueing as
    realize, exposed for transporting maps)."""
    gens = [g for _, g in generator_morphisms(X.site, X.N)]
    out: dict = {}
    for k in range(K + 1):
        uf = _UnionFind()
        for n in range(X.N + 1):
            for x in X.levels[n]:
                for s in simplices(n, k):
                    uf.add((n, x, s))
        for u in gens:
            a, b = u.src, u.dst
            tab = X.action[u]
            push = act_on_cube(u, k)
            for x in X.levels[b]:
                moved = tab[x]
                for s in simplices(a, k):
                    uf.union((a, moved, s), (b, x, push(s)))
        for _, members in uf.classes().items():
            least = min(members)
            cid = f"{least[1]}@{_threshold_id(least[2])}"
            for n, x, s in members:
                out[(k, n, x, s)] = cid
    return out


# -- chains and homology -----------------------------------------------------


@dataclass
class ChainComplex:
    """Integer boundary matrices over nondegenerate bases."""

    bases: dict[int, tuple]
    boundaries: dict[int, list]  # k -> matrix (len(bases[k-1]) x len(bases[k]))

    def verify_square_zero(self) -> bool:
        degrees = sorted(self.boundaries)
        for k in degrees:
            if k - 1 not in self.boundaries:
                continue
            a, b = self.boundaries[k - 1], self.boundaries[k]
            rows = len(a)
            mid = len(b)
            cols = len(b[0]) if b else 0
            for r in range(rows):
                for c in range(cols):
                    if sum(a[r][m] * b[m][c] for m in range(mid)) != 0:
                        return False
        return True


def normalized_chains(S: SimplicialSet) -> ChainComplex:
    bases = {k: S.nondegenerate(k) for k in range(S.K + 1)}
    index = {
        k: {s: c for c, s in enumerate(bases[k])} for k in range(S.K + 1)
    }
    boundaries = {}
    for k in range(1, S.K + 1):
        rows, cols = len(bases[k - 1]), len(bases[k])
        M = [[0] * cols for _ in range(rows)]
        for c, s in enumerate(bases[k]):
            for i in range(k + 1):
                fs = S.face(k, i, s)
                r = index[k - 1].get(fs)
                if r is not None:
                    M[r][c] += -1 if i % 2 else 1
        boundaries[k] = M
    C = ChainComplex(bases, boundaries)
    assert C.verify_square_zero(), "boundary does not square to zero"
    return C


def smith_normal_form(M: list) -> tuple:
    """(D, U, V) with U*M*V = D, D diagonal with a divisibility chain,
    U and V unimodular.  Exact integer arithmetic throughout."""
    rows = len(M)
    cols = len(M[0]) if rows else 0
    D = [list(map(int, row)) for row in M]
    U = [[int(i == j) for j in range(rows)] for i in range(rows)]
    V = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(a, b):
        D[a], D[b] = D[b], D[a]
        U[a], U[b] = U[b], U[a]

    def swap_cols(a, b):
        for row in D:
            row[a], row[b] = row[b], row[a]
        for row in V:
            row[a], row[b] = row[b], row[a]

    def add_row(dst, src, q):
        D[dst] = [x + q * y for x, y in zip(D[dst], D[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for row in D:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    def negate_row(a):
        D[a] = [-x for x in D[a]]
        U[a] = [-x for x in U[a]]

    t = 0
    while t < min(rows, cols):
        # pick the smallest nonzero entry of the remaining block
        pivot = None
        for r in range(t, rows):
            for c in range(t, cols):
                v = abs(D[r][c])
                if v and (pivot is None or v < abs(D[pivot[0]][pivot[1]])):
                    pivot = (r, c)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        dirty = True
        while dirty:
            dirty = False
            for r in range(t + 1, rows):
                if D[r][t]:
                    q = D[r][t] // D[t][t]
                    add_row(r, t, -q)
                    if D[r][t]:
                        swap_rows(t, r)
                        dirty = True
            for c in range(t + 1, cols):
                if D[t][c]:
                    q = D[t][c] // D[t][t]
                    add_col(c, t, -q)
                    if D[t][c]:
                        swap_cols(t, c)
                        dirty = True
        if D[t][t] < 0:
            negate_row(t)
        # restore divisibility: fold any non-multiple into the pivot
        offender = None
        for r in range(t + 1, rows):
            for c in range(t + 1, cols):
                if D[r][c] % D[t][t]:
                    offender = r
                    break
            if offender is not None:
                break
        if offender is not None:
            add_row(t, offender, 1)
            continue
        t += 1
    return D, U, V


def _unimodular(M: list) -> bool:
    n = len(M)
    if n == 0:
        return True
    # Bareiss fraction-free elimination for an exact determinant
    A = [row[:] for row in M]
    sign = 1
    prev = 1
    for i in range(n - 1):
        if A[i][i] == 0:
            for r in range(i + 1, n):
                if A[r][i]:
                    A[i], A[r] = A[r], A[i]
                    sign = -sign
                    break
            else:
                return False
        for r in range(i + 1, n):
            for c in range(i + 1, n):
                A[r][c] = (A[r][c] * A[i][i] - A[r][i] * A[i][c]) // prev
            A[r][i] = 0
        prev = A[i][i]
    return abs(sign * A[n - 1][n - 1]) == 1


def verify_snf(M: list) -> Report:
    """U*M*V = D, divisibility, unimodularity: the full contract."""
    report = Report("smith normal form")
    D, U, V = smith_normal_form(M)
    rows, cols = len(M), len(M[0]) if M else 0

    def mat_mul(A, B):
        if not A or not B:
            return [[0] * (len(B[0]) if B else 0) for _ in A]
        return [
            [sum(A[r][m] * B[m][c] for m in range(len(B)))
             for c in range(len(B[0]))]
            for r in range(len(A))
        ]

    prod = mat_mul(mat_mul(U, M), V)
    report.check("U*M*V equals D", prod == D)
    diag = [D[i][i] for i in range(min(rows, cols))]
    off = all(
        D[r][c] == 0
        for r in range(rows) for c in range(cols) if r != c
    )
    report.check("D is diagonal", off)
    chain = all(
        diag[i + 1] % diag[i] == 0
        for i in range(len(diag) - 1)
        if diag[i]
    ) and all(
        diag[i + 1] == 0 or diag[i] != 0 for i in range(len(diag) - 1)
    )
    report.check("divisibility chain", chain)
    report.check("U unimodular", _unimodular(U))
    report.check("V unimodular", _unimodular(V))
    return report


@dataclass
class HomologyResult:
    """Per degree: free rank and torsion coefficients (each ≥ 2,
    each dividing the next)."""

    groups: tuple  # of (betti, (torsion, ...))

    def betti(self) -> tuple:
        return tuple(b for b, _ in self.groups)

    def pretty(self) -> str:
        lines = []
        for k, (b, torsion) in enumerate(self.groups):
            parts = []
            if b == 1:
                parts.append("Z")
            elif b > 1:
                parts.append(f"Z^{b}")
            parts.extend(f"Z/{t}" for t in torsion)
            lines.append(f"H_{k} = " + (" + ".join(parts) if parts else "0"))
        return "\n".join(lines)

    def to_json(self) -> str:
        return json.dumps(
            [{"degree": k, "betti": b, "torsion": list(t)}
             for k, (b, t) in enumerate(self.groups)]
        )


def homology_of_chains(C: ChainComplex) -> HomologyResult:
    top = max(C.bases)
    ranks = {}
    divisors = {}
    for k in range(1, top + 1):
        M = C.boundaries[k]
        if not M or not M[0]:
            ranks[k] = 0
            divisors[k] = []
            continue
        D, _, _ = smith_normal_form(M)
        diag = [D[i][i] for i in range(min(len(D), len(D[0])))]
        nonzero = [d for d in diag if d]
        ranks[k] = len(nonzero)
        divisors[k] = nonzero
    groups = []
    for k in range(top + 1):
        n_k = len(C.bases[k])
        below = ranks.get(k, 0)
        above = ranks.get(k + 1, 0)
        betti = n_k - below - above
        torsion = tuple(d for d in divisors.get(k + 1, []) if d > 1)
        groups.append((betti, torsion))
    while len(groups) > 1 and groups[-1] == (0, ()):
        groups.pop()
    return HomologyResult(tuple(groups))


def homology(X: SkeletalPresheaf) -> HomologyResult:
    return homology_of_chains(normalized_chains(realize(X)))


def euler_characteristic(S: SimplicialSet) -> int:
    return sum(
        (-1) ** k * len(S.nondegenerate(k)) for k in range(S.K + 1)
    )


# -- the interval as a cubical monoid ----------------------------------------


def verify_cubical_monoid_delta1(up_to_level: int) -> Report:
    """Pointwise minimum makes the interval a monoid in simplicial
    sets: associative, unit the 1-endpoint, absorbing the 0-endpoint,
    compatible with the simplicial operators."""
    report = Report(f"interval monoid to level {up_to_level}")
    if up_to_level < 0:
        raise InputError("negative level bound")
    assoc = unit = absorb = natural = True
    for k in range(up_to_level + 1):
        one, zero = 0, k + 1  # thresholds of the constant maps
        ts = range(k + 2)
        for a in ts:
            if max(a, one) != a or max(one, a) != a:
                unit = False
            if max(a, zero) != zero or max(zero, a) != zero:
                absorb = False
            for b in ts:
                for c in ts:
                    if max(max(a, b), c) != max(a, max(b, c)):
                        assoc = False
        if k >= 1:
            for a in ts:
                for b in ts:
                    for i in range(k + 1):
                        lhs = face_threshold(max(a, b), i)
                        if lhs != max(face_threshold(a, i),
                                      face_threshold(b, i)):
                            natural = False
        for a in ts:
            for b in ts:
                for j in range(k + 1):
                    lhs = degeneracy_threshold(max(a, b), j)
                    if lhs != max(degeneracy_threshold(a, j),
                                  degeneracy_threshold(b, j)):
                        natural = False
    report.check("multiplication associative", assoc)
    report.check("endpoint 1 a two-sided unit", unit)
    report.check("endpoint 0 absorbing", absorb)
    report.check("multiplication is simplicial", natural)
    # the collapse to the point is a monoid map: both composites land
    # on the unique simplex, so the square commutes by finality
    report.check("collapse to the point is a monoid map", True,
                 "both composites factor through the unique simplex")
    return report
