"""Finite cubical and extended cubical sets as skeletal presheaves.

A presheaf is stored as finitely many levels of opaque section ids plus
the contravariant action of the generating morphisms; the action of an
arbitrary morphism is derived from its normal-form generator word.  A
SkeletalPresheaf denotes the left Kan extension of its truncation, so
levels above the stored bound can be materialized on demand; a
TruncatedPresheaf refuses to extend.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property

from .errors import (
    BadDimension,
    IndexOutOfRange,
    InputError,
    ResourceBound,
    TruncationMismatch,
)
from .report import Report
from .site import (
    Const,
    Morphism,
    Permutation,
    SiteTag,
    classify,
    compose,
    delta,
    enumerate_hom,
    factor,
    gamma,
    identity,
    parse_morphism,
    pi,
    sigma,
)


def generator_morphisms(site: SiteTag, N: int) -> list[tuple[str, Morphism]]:
    """Named generators with both dimensions <= N, in a fixed order.

    Names follow the constructor arguments: delta(i,eps,n) maps level
    n+1 data to level n, sigma(i,n) and gamma(i,n) map level n data to
    level n+1, swap(i,n) permutes level n.
    """
    out = []
    for n in range(N):
        for i in range(1, n + 2):
            for eps in (0, 1):
                out.append((f"delta({i},{eps},{n})", delta(i, eps, n)))
        for i in range(1, n + 2):
            out.append((f"sigma({i},{n})", sigma(i, n)))
        if site is SiteTag.QSIGMA:
            for i in range(1, n + 1):
                out.append((f"gamma({i},{n})", gamma(i, n)))
    if site is SiteTag.QSIGMA:
        for n in range(2, N + 1):
            for i in range(1, n):
                out.append(
                    (f"swap({i},{n})", pi(Permutation.transposition(i, i + 1, n)))
                )
    return out


def parse_generator_name(name: str, site: SiteTag) -> Morphism:
    try:
        kind, rest = name.split("(", 1)
        args = [int(a) for a in rest.rstrip(")").split(",")]
        if kind == "delta":
            return delta(args[0], args[1], args[2])
        if kind == "sigma":
            return sigma(args[0], args[1])
        if kind == "gamma" and site is SiteTag.QSIGMA:
            return gamma(args[0], args[1])
        if kind == "swap" and site is SiteTag.QSIGMA:
            return pi(Permutation.transposition(args[0], args[0] + 1, args[1]))
    except (ValueError, IndexError, IndexOutOfRange) as exc:
        raise InputError(f"bad generator name {name!r}: {exc}") from exc
    raise InputError(f"bad generator name {name!r} for site {site}")


def _cosymmetry_perms(site: SiteTag, n: int):
    if site is SiteTag.Q:
        return [Permutation.identity(n)]
    return [Permutation(p) for p in itertools.permutations(range(1, n + 1))]


@dataclass(frozen=True)
class SectionRef:
    level: int
    id: str


class SkeletalPresheaf:
    """Levels of section ids plus generator actions, denoting the left
    Kan extension of the stored truncation."""

    truncated = False

    def __init__(self, site, N, levels, action, name="X"):
        self.site = site
        self.N = N
        self.levels = {n: tuple(levels.get(n, ())) for n in range(N + 1)}
        self.action = action
        self.name = name
        self._tables: dict[Morphism, dict[str, str]] = {}
        self._ez_cache: dict[tuple[int, str], tuple[Morphism, SectionRef]] = {}
        self._check_structure()

    def _check_structure(self):
        for n, ids in self.levels.items():
            if len(set(ids)) != len(ids):
                raise InputError(f"duplicate section ids at level {n}")
        expected = generator_morphisms(self.site, self.N)
        have = set(self.action)
        for gname, g in expected:
            if g not in have:
                raise InputError(f"missing action for {gname}")
            table = self.action[g]
            src_ids = set(self.levels[g.dst])
            if set(table) != src_ids:
                raise InputError(f"action of {gname} not total on level {g.dst}")
            if not set(table.values()) <= set(self.levels[g.src]):
                raise InputError(f"action of {gname} leaves level {g.src}")
        if len(have) != len(expected):
            raise InputError("action stores unexpected generators")

    def level(self, n: int) -> tuple[str, ...]:
        if n > self.N:
            raise TruncationMismatch(
                f"{self.name} is only stored up to level {self.N}"
            )
        return self.levels[n]

    def sections(self):
        for n in range(self.N + 1):
            for sid in self.levels[n]:
                yield SectionRef(n, sid)

    def size(self) -> tuple[int, ...]:
        return tuple(len(self.levels[n]) for n in range(self.N + 1))

    def table(self, f: Morphism) -> dict[str, str]:
        """The action of an arbitrary morphism, level f.dst -> level f.src."""
        if f.dst > self.N or f.src > self.N:
            raise TruncationMismatch(f"{f} exceeds stored levels of {self.name}")
        cached = self._tables.get(f)
        if cached is not None:
            return cached
        word = factor(f).generator_word()
        gens = []
        for kind, n, *args in word:
            if kind == "delta":
                gens.append(delta(args[0], args[1], n))
            elif kind == "sigma":
                gens.append(sigma(args[0], n))
            elif kind == "gamma":
                gens.append(gamma(args[0], n))
            else:
                gens.append(pi(Permutation.transposition(args[0], args[0] + 1, n)))
        result = {}
        for x in self.levels[f.dst]:
            v = x
            for g in reversed(gens):  # contravariance: last applied acts first
                v = self.action[g][v]
            result[x] = v
        self._tables[f] = result
        return result

    def act(self, f: Morphism, sid: str) -> str:
        return self.table(f)[sid]

    # -- EZ decomposition ---------------------------------------------------

    def ez_decompose(self, ref: SectionRef) -> tuple[Morphism, SectionRef]:
        """The section as (epi, nondegenerate): act(epi)(y) = ref.id.

        Greedy descent through the corank-one epis.  A single section
        per epi suffices: if the section lies in the image of the epi
        action at all, any section of the epi recovers a preimage.  The
        twisted collapses (epis with a nontrivial cosymmetry part) must
        be tried too; generator images alone miss, for example, the
        section (x2^x1):2->1 of the extended interval.
        """
        key = (ref.level, ref.id)
        cached = self._ez_cache.get(key)
        if cached is not None:
            return cached
        epi = identity(ref.level)
        level, sid = ref.level, ref.id
        progress = True
        while progress and level > 0:
            progress = False
            for g, d in _descent_steps(self.site, level):
                y = self.act(d, sid)
                if self.act(g, y) == sid:
                    epi = compose(g, epi)
                    level, sid = level - 1, y
                    progress = True
                    break
        result = (epi, SectionRef(level, sid))
        self._ez_cache[key] = result
        return result

    def is_nondegenerate(self, ref: SectionRef) -> bool:
        return self.ez_decompose(ref)[0] == identity(ref.level)

    # -- skeletal extension -------------------------------------------------

    def extend_to(self, N2: int) -> "SkeletalPresheaf":
        if N2 <= self.N:
            return self
        X = self
        for n in range(self.N + 1, N2 + 1):
            X = X._extend_one()
        return X

    def _canonical_pair(self, epi: Morphism, ref: SectionRef) -> str:
        """Canonical id for the extended section act(epi)(ref), as the
        least (epi, nondegenerate) pair over the cosymmetry orbit."""
        e2, y = self.ez_decompose(ref)
        total = compose(e2, epi)
        m = total.dst
        best = None
        for th in _cosymmetry_perms(self.site, m):
            cand = (str(compose(pi(th), total)), self.act(pi(th.inverse()), y.id))
            if best is None or cand < best:
                best = cand
        return f"{best[0]}|{best[1]}"

    def _extend_one(self) -> "SkeletalPresheaf":
        n = self.N + 1
        pairs = {}
        for m in range(self.N + 1):
            for e in enumerate_hom(n, m, self.site):
                if not classify(e).is_epi:
                    continue
                for sid in self.levels[m]:
                    ref = SectionRef(m, sid)
                    if self.is_nondegenerate(ref):
                        pid = self._canonical_pair(e, ref)
                        pairs[pid] = (e, ref)
        new_levels = dict(self.levels)
        new_levels[n] = tuple(sorted(pairs))
        new_action = dict(self.action)
        for gname, g in generator_morphisms(self.site, n):
            if g in new_action:
                continue
            table = {}
            if g.dst == n:  # action from the new level downward or sideways
                for pid, (e, ref) in pairs.items():
                    h = compose(e, g)  # [g.src] -> [ref.level]
                    if g.src == n:
                        table[pid] = self._canonical_pair(h, ref)
                    else:
                        table[pid] = self.act(h, ref.id)
            else:  # epi generator upward into the new level
                for sid in self.levels[g.dst]:
                    table[sid] = self._canonical_pair(g, SectionRef(g.dst, sid))
            new_action[g] = table
        return SkeletalPresheaf(self.site, n, new_levels, new_action, self.name)

    def same_data(self, other: "SkeletalPresheaf") -> bool:
        return (
            self.site == other.site
            and self.N == other.N
            and self.levels == other.levels
            and self.action == other.action
        )

    def __repr__(self):
        return f"<{type(self).__name__} {self.name} {self.size()}>"


class TruncatedPresheaf(SkeletalPresheaf):
    """Same data, but levels above N are genuinely undetermined."""

    truncated = True

    def extend_to(self, N2: int):
        if N2 <= self.N:
            return self
        raise TruncationMismatch(
            f"{self.name} is truncated at {self.N}; cannot extend to {N2}"
        )


_DESCENT_CACHE: dict[tuple[SiteTag, int], tuple[tuple[Morphism, Morphism], ...]] = {}


def _descent_steps(site: SiteTag, level: int):
    """All corank-one epis [level] -> [level-1] paired with one section
    each, the candidates for one degeneracy step."""
    key = (site, level)
    cached = _DESCENT_CACHE.get(key)
    if cached is None:
        from .site import sections_of

        cached = tuple(
            (e, sections_of(e)[0])
            for e in enumerate_hom(level, level - 1, site)
            if classify(e).is_epi
        )
        _DESCENT_CACHE[key] = cached
    return cached


# -- presheaf maps -----------------------------------------------------------


@dataclass
class PresheafMap:
    src: SkeletalPresheaf
    dst: SkeletalPresheaf
    mapping: dict[int, dict[str, str]]

    def apply(self, ref: SectionRef) -> SectionRef:
        return SectionRef(ref.level, self.mapping[ref.level][ref.id])

    def level_map(self, n: int) -> dict[str, str]:
        return self.mapping[n]

    def is_injective(self) -> bool:
        return all(
            len(set(m.values())) == len(m) for m in self.mapping.values()
        )

    def is_bijective(self) -> bool:
        return self.is_injective() and all(
            set(self.mapping[n].values()) == set(self.dst.level(n))
            for n in self.mapping
        )

    def verify_natural(self) -> bool:
        N = min(self.src.N, self.dst.N)
        for _, g in generator_morphisms(self.src.site, N):
            for x in self.src.level(g.dst):
                lhs = self.dst.act(g, self.mapping[g.dst][x])
                rhs = self.mapping[g.src][self.src.act(g, x)]
                if lhs != rhs:
                    return False
        return True

    def then(self, other: "PresheafMap") -> "PresheafMap":
        """other o self."""
        new = {
            n: {x: other.mapping[n][v] for x, v in m.items()}
            for n, m in self.mapping.items()
        }
        return PresheafMap(self.src, other.dst, new)

    def key(self):
        return tuple(
            (n, tuple(sorted(self.mapping[n].items())))
            for n in sorted(self.mapping)
        )


def identity_map(X: SkeletalPresheaf) -> PresheafMap:
    return PresheafMap(X, X, {n: {x: x for x in X.level(n)} for n in range(X.N + 1)})


def inclusion_map(sub: SkeletalPresheaf, amb: SkeletalPresheaf) -> PresheafMap:
    return PresheafMap(
        sub, amb, {n: {x: x for x in sub.level(n)} for n in range(sub.N + 1)}
    )


# -- basic constructions -----------------------------------------------------


def _precompose_action(site, N, level_sets):
    """Generator actions by precomposition for levels of morphism ids."""
    action = {}
    by_level = {n: [parse_morphism(s) for s in level_sets[n]] for n in level_sets}
    for _, g in generator_morphisms(site, N):
        action[g] = {str(x): str(compose(x, g)) for x in by_level[g.dst]}
    return action


def representable(n: int, site: SiteTag = SiteTag.QSIGMA,
                  up_to: int | None = None) -> SkeletalPresheaf:
    """The standard n-cube; levels are hom-sets, action is precomposition."""
    N = n if up_to is None else max(n, up_to)
    levels = {
        m: tuple(sorted(str(f) for f in enumerate_hom(m, n, site)))
        for m in range(N + 1)
    }
    return SkeletalPresheaf(
        site, N, levels, _precompose_action(site, N, levels), f"cube{n}"
    )


def in_boundary(f: Morphism) -> bool:
    """Membership in the boundary of the f.dst-cube: some entry constant,
    equivalently f factors through a proper face."""
    return any(isinstance(e, Const) for e in f.entries)


def boundary(n: int, site: SiteTag = SiteTag.QSIGMA,
             up_to: int | None = None) -> tuple[SkeletalPresheaf, PresheafMap]:
    """The union of the proper faces, with its inclusion into the cube."""
    if n < 1:
        raise BadDimension("the 0-cube has empty boundary")
    N = n if up_to is None else max(n, up_to)
    levels = {
        m: tuple(
            sorted(
                str(f) for f in enumerate_hom(m, n, site) if in_boundary(f)
            )
        )
        for m in range(N + 1)
    }
    X = SkeletalPresheaf(
        site, N, levels, _precompose_action(site, N, levels), f"bd{n}"
    )
    return X, inclusion_map(X, representable(n, site, up_to=N))


def in_cap(f: Morphism, i: int, eps: int) -> bool:
    """Membership in the cap: f factors through some face other than (i, eps)."""
    return any(
        (j, e.bit) != (i, eps)
        for j, e in enumerate(f.entries, start=1)
        if isinstance(e, Const)
    )


def cap(n: int, i: int, eps: int, site: SiteTag = SiteTag.Q,
        up_to: int | None = None) -> tuple[SkeletalPresheaf, PresheafMap]:
    """All faces of the n-cube except the (i, eps) one."""
    if not (1 <= i <= n) or eps not in (0, 1):
        raise IndexOutOfRange(f"cap({n},{i},{eps}) out of range")
    N = n if up_to is None else max(n, up_to)
    levels = {
        m: tuple(
            sorted(
                str(f)
                for f in enumerate_hom(m, n, site)
                if in_cap(f, i, eps)
            )
        )
        for m in range(N + 1)
    }
    X = SkeletalPresheaf(
        site, N, levels, _precompose_action(site, N, levels), f"cap{n}_{i}_{eps}"
    )
    return X, inclusion_map(X, representable(n, site, up_to=N))


def empty_presheaf(site: SiteTag, N: int = 0) -> SkeletalPresheaf:
    levels = {n: () for n in range(N + 1)}
    action = {g: {} for _, g in generator_morphisms(site, N)}
    return SkeletalPresheaf(site, N, levels, action, "empty")


def terminal_presheaf(site: SiteTag, N: int = 0) -> SkeletalPresheaf:
    return representable(0, site, up_to=N)


def terminal_map(X: SkeletalPresheaf) -> PresheafMap:
    T = terminal_presheaf(X.site, X.N)
    star = {n: T.level(n)[0] for n in range(X.N + 1)}
    return PresheafMap(
        X, T, {n: {x: star[n] for x in X.level(n)} for n in range(X.N + 1)}
    )


# -- skeleta and coskeleta ---------------------------------------------------


def skeleton(X: SkeletalPresheaf, k: int) -> tuple[SkeletalPresheaf, PresheafMap]:
    """The subpresheaf of sections with nondegenerate part in degree <= k."""
    if k >= X.N:
        return X, identity_map(X)
    levels = {}
    for n in range(X.N + 1):
        levels[n] = tuple(
            sid
            for sid in X.level(n)
            if X.ez_decompose(SectionRef(n, sid))[1].level <= k
        )
    keep = {n: set(levels[n]) for n in levels}
    action = {
        g: {x: v for x, v in X.action[g].items() if x in keep[g.dst]}
        for g in X.action
    }
    S = SkeletalPresheaf(X.site, X.N, levels, action, f"sk{k}_{X.name}")
    return S, inclusion_map(S, X)


def truncate(X: SkeletalPresheaf, k: int) -> TruncatedPresheaf:
    levels = {n: X.level(n) for n in range(k + 1)}
    action = {g: dict(X.action[g]) for _, g in generator_morphisms(X.site, k)}
    return TruncatedPresheaf(X.site, k, levels, action, f"tr{k}_{X.name}")


def coskeleton(X: SkeletalPresheaf, k: int, up_to: int | None = None) -> TruncatedPresheaf:
    """Right Kan extension data: level r is Hom(sk_k cube(r), X)."""
    N = X.N if up_to is None else up_to
    level_maps: dict[int, dict[str, PresheafMap]] = {}
    skeletons = {}
    for r in range(N + 1):
        # materialize to the common bound so composites below stay total
        cube_r = representable(r, X.site, up_to=N)
        sk_r, _ = skeleton(cube_r, k)
        skeletons[r] = sk_r
        maps = hom_presheaf(sk_r, X)
        level_maps[r] = {_map_id(u): u for u in maps}
    levels = {r: tuple(sorted(level_maps[r])) for r in range(N + 1)}
    action = {}
    for _, g in generator_morphisms(X.site, N):
        # act(g): level g.dst -> level g.src by precomposing with sk_k(g o -)
        table = {}
        src_sk = skeletons[g.src]
        for uid, u in level_maps[g.dst].items():
            new_mapping = {}
            for m in range(src_sk.N + 1):
                new_mapping[m] = {
                    sid: u.mapping[m][str(compose(g, parse_morphism(sid)))]
                    for sid in src_sk.level(m)
                }
            table[uid] = _map_id(PresheafMap(src_sk, X, new_mapping))
        action[g] = table
    return TruncatedPresheaf(X.site, N, levels, action, f"ck{k}_{X.name}")


def _map_id(u: PresheafMap) -> str:
    parts = []
    for n in sorted(u.mapping):
        for x, v in sorted(u.mapping[n].items()):
            parts.append(f"{x}~{v}")
    return ";".join(parts)


# -- spec-level wrappers -----------------------------------------------------


def ez_decompose_section(X: SkeletalPresheaf, x: SectionRef):
    return X.ez_decompose(x)


def nondegenerate_sections(X: SkeletalPresheaf, k: int) -> list[SectionRef]:
    return [
        SectionRef(k, sid)
        for sid in X.level(k)
        if X.is_nondegenerate(SectionRef(k, sid))
    ]


# -- hom-sets ----------------------------------------------------------------


def hom_presheaf(
    X: SkeletalPresheaf, Y: SkeletalPresheaf, limit: int | None = None
) -> list[PresheafMap]:
    """All presheaf maps X -> Y, by backtracking over values on the
    nondegenerate sections of X, with face constraints for pruning and a
    full naturality check on each completed candidate."""
    if Y.N < X.N:
        Y = Y.extend_to(X.N)
    nd = []
    for k in range(X.N + 1):
        nd.extend(nondegenerate_sections(X, k))
    results: list[PresheafMap] = []
    assigned: dict[tuple[int, str], str] = {}

    def value_of(ref: SectionRef) -> str:
        e, y = X.ez_decompose(ref)
        return Y.act(e, assigned[(y.level, y.id)])

    def consistent(ref: SectionRef, v: str) -> bool:
        k = ref.level
        for i in range(1, k + 1):
            for eps in (0, 1):
                d = delta(i, eps, k - 1)
                if Y.act(d, v) != value_of(SectionRef(k - 1, X.act(d, ref.id))):
                    return False
        if X.site is SiteTag.QSIGMA:
            for i in range(1, k):
                s = pi(Permutation.transposition(i, i + 1, k))
                mate = X.act(s, ref.id)
                if (mate == ref.id and Y.act(s, v) != v) or (
                    (k, mate) in assigned and Y.act(s, v) != assigned[(k, mate)]
                ):
                    return False
        return True

    def finish():
        mapping = {
            n: {sid: value_of(SectionRef(n, sid)) for sid in X.level(n)}
            for n in range(X.N + 1)
        }
        u = PresheafMap(X, Y, mapping)
        if u.verify_natural():
            results.append(u)
            if limit is not None and len(results) > limit:
                raise ResourceBound(f"more than {limit} presheaf maps")

    def search(idx: int):
        if idx == len(nd):
            finish()
            return
        ref = nd[idx]
        for v in Y.level(ref.level):
            if consistent(ref, v):
                assigned[(ref.level, ref.id)] = v
                search(idx + 1)
                del assigned[(ref.level, ref.id)]

    search(0)
    return results


def find_isomorphism(X: SkeletalPresheaf, Y: SkeletalPresheaf):
    """A levelwise-bijective presheaf map X -> Y, or None (exhaustive)."""
    if X.N < Y.N:
        X = X.extend_to(Y.N)
    if X.N == Y.N and X.size() != Y.size():
        return None
    for u in hom_presheaf(X, Y):
        if u.is_bijective():
            return u
    return None


# -- colimits ----------------------------------------------------------------


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            # least representative wins, for deterministic output
            lo, hi = sorted((rx, ry))
            self.parent[hi] = lo

    def classes(self):
        groups: dict = {}
        for x in self.parent:
            groups.setdefault(self.find(x), []).append(x)
        return groups


def pushout(f: PresheafMap, g: PresheafMap):
    """Levelwise pushout of B <- A -> C; returns (P, B -> P, C -> P)."""
    A, B, C = f.src, f.dst, g.dst
    if g.src is not A and not g.src.same_data(A):
        raise InputError("pushout legs must share a source")
    if not (A.N == B.N == C.N) or not (A.site == B.site == C.site):
        raise TruncationMismatch("pushout needs matching sites and truncations")
    uf = {n: _UnionFind() for n in range(A.N + 1)}
    for n in range(A.N + 1):
        for x in B.level(n):
            uf[n].add(("B", x))
        for x in C.level(n):
            uf[n].add(("C", x))
        for a in A.level(n):
            uf[n].union(("B", f.mapping[n][a]), ("C", g.mapping[n][a]))
    rep = {
        n: {x: uf[n].find(x) for x in uf[n].parent} for n in range(A.N + 1)
    }
    def tag(t):
        return f"{t[0]}:{t[1]}"
    levels = {
        n: tuple(sorted({tag(r) for r in rep[n].values()}))
        for n in range(A.N + 1)
    }
    action = {}
    for _, gen in generator_morphisms(A.site, A.N):
        table = {}
        for x, r in rep[gen.dst].items():
            side, sid = x
            source = B if side == "B" else C
            img = tag(rep[gen.src][(side, source.act(gen, sid))])
            prev = table.setdefault(tag(r), img)
            # glued sections must act compatibly; guaranteed when the
            # legs are natural
            assert prev == img, (gen, x)
        action[gen] = table
    P = SkeletalPresheaf(A.site, A.N, levels, action, "pushout")
    into_B = PresheafMap(
        B, P, {n: {x: tag(rep[n][("B", x)]) for x in B.level(n)} for n in rep}
    )
    into_C = PresheafMap(
        C, P, {n: {x: tag(rep[n][("C", x)]) for x in C.level(n)} for n in rep}
    )
    return P, into_B, into_C


def coproduct(parts: list[SkeletalPresheaf]):
    """Disjoint union; returns (X, list of injections)."""
    assert parts, "need at least one part"
    site_tag, N = parts[0].site, parts[0].N
    assert all(p.site == site_tag and p.N == N for p in parts)
    levels = {
        n: tuple(
            f"{i}:{sid}" for i, p in enumerate(parts) for sid in p.level(n)
        )
        for n in range(N + 1)
    }
    action = {}
    for _, g in generator_morphisms(site_tag, N):
        action[g] = {
            f"{i}:{sid}": f"{i}:{p.act(g, sid)}"
            for i, p in enumerate(parts)
            for sid in p.level(g.dst)
        }
    X = SkeletalPresheaf(site_tag, N, levels, action, "coproduct")
    injections = [
        PresheafMap(
            p, X, {n: {sid: f"{i}:{sid}" for sid in p.level(n)} for n in range(N + 1)}
        )
        for i, p in enumerate(parts)
    ]
    return X, injections


# -- group quotients ---------------------------------------------------------


@dataclass(frozen=True)
class SubgroupSpec:
    n: int
    generators: tuple[Permutation, ...]

    @cached_property
    def members(self) -> frozenset[Permutation]:
        found = {Permutation.identity(self.n)}
        frontier = list(found)
        while frontier:
            p = frontier.pop()
            for q in self.generators:
                r = q.after(p)
                if r not in found:
                    found.add(r)
                    frontier.append(r)
        return frozenset(found)

    @classmethod
    def trivial(cls, n: int) -> "SubgroupSpec":
        return cls(n, ())

    @classmethod
    def full(cls, n: int) -> "SubgroupSpec":
        if n <= 1:
            return cls.trivial(n)
        return cls(
            n,
            tuple(
                Permutation.transposition(i, i + 1, n) for i in range(1, n)
            ),
        )


def quotient_presheaf(X: SkeletalPresheaf, H: SubgroupSpec, name="quot"):
    """Orbits of the postcomposition action of H on a presheaf whose ids
    are morphisms into the H-ambient cube; returns (Q, projection)."""
    orbit_of = {}
    levels = {}
    for n in range(X.N + 1):
        seen = {}
        for sid in X.level(n):
            x = parse_morphism(sid)
            orbit = sorted(str(compose(pi(h), x)) for h in H.members)
            seen[sid] = orbit[0]
        orbit_of[n] = seen
        levels[n] = tuple(sorted(set(seen.values())))
    action = {}
    for _, g in generator_morphisms(X.site, X.N):
        action[g] = {
            orbit_of[g.dst][sid]: orbit_of[g.src][X.act(g, sid)]
            for sid in X.level(g.dst)
        }
    Qp = SkeletalPresheaf(X.site, X.N, levels, action, name)
    proj = PresheafMap(
        X, Qp, {n: dict(orbit_of[n]) for n in orbit_of}
    )
    return Qp, proj


def quotient_by_group(n: int, H: SubgroupSpec, site: SiteTag = SiteTag.QSIGMA,
                      up_to: int | None = None):
    return quotient_presheaf(
        representable(n, site, up_to=up_to), H, name=f"H\\cube{n}"
    )


def stabilizer(X: SkeletalPresheaf, x: SectionRef) -> SubgroupSpec:
    """The cosymmetries of the level fixing the section under the
    presheaf's own action."""
    fixers = tuple(
        th
        for th in _cosymmetry_perms(X.site, x.level)
        if X.act(pi(th), x.id) == x.id
    )
    return SubgroupSpec(x.level, fixers)


# -- the orbit cellular model ------------------------------------------------


def verify_skeletal_pushout(X: SkeletalPresheaf, k: int) -> Report:
    """Attaching the isomorphism classes of nondegenerate k-sections
    along stabilizer quotients of the boundary turns sk_{k-1} X into
    sk_k X; checks the pushout comparison levelwise."""
    report = Report(f"skeletal-pushout({X.name},k={k})")
    sk_k, _ = skeleton(X, k)
    if k == 0:
        prev = empty_presheaf(X.site, X.N)
    else:
        prev, _ = skeleton(X, k - 1)

    # above the stored range a skeletal presheaf has no nondegenerate
    # sections, so there is nothing to attach
    nd = nondegenerate_sections(X, k) if k <= X.N else []
    reps = []
    seen = set()
    for ref in sorted(nd, key=lambda r: r.id):
        if ref.id in seen:
            continue
        orbit = {X.act(pi(th), ref.id) for th in _cosymmetry_perms(X.site, k)}
        seen |= orbit
        reps.append(SectionRef(k, min(orbit)))

    parts_A, parts_B = [], []
    maps_A_to_B, attach_data = [], []
    cell_cache: dict = {}
    for ref in reps:
        S = stabilizer(X, ref)
        cache_key = S.members
        if cache_key not in cell_cache:
            cube = representable(k, X.site, up_to=X.N)
            QB, _ = quotient_presheaf(cube, S, name="SB")
            if k >= 1:
                bd, _ = boundary(k, X.site, up_to=X.N)
                QA, _ = quotient_presheaf(bd, S, name="SA")
            else:
                QA = empty_presheaf(X.site, X.N)
            cell_cache[cache_key] = (QA, QB)
        QA, QB = cell_cache[cache_key]
        parts_A.append(QA)
        parts_B.append(QB)
        incl = {
            n: {sid: sid for sid in QA.level(n)} for n in range(X.N + 1)
        }
        maps_A_to_B.append(incl)
        attach_data.append(ref)

    if reps:
        A, injA = coproduct(parts_A)
        B, injB = coproduct(parts_B)
        f_map = PresheafMap(
            A,
            B,
            {
                n: {
                    f"{i}:{sid}": f"{i}:{maps_A_to_B[i][n][sid]}"
                    for i, QA in enumerate(parts_A)
                    for sid in QA.level(n)
                }
                for n in range(X.N + 1)
            },
        )
        g_map = PresheafMap(
            A,
            prev,
            {
                n: {
                    f"{i}:{sid}": X.act(parse_morphism(sid), attach_data[i].id)
                    for i, QA in enumerate(parts_A)
                    for sid in QA.level(n)
                }
                for n in range(X.N + 1)
            },
        )
        report.check("attaching map is natural", g_map.verify_natural())
        report.check(
            "boundary quotient inclusion injective", f_map.is_injective()
        )
        P, into_B, into_C = pushout(f_map, g_map)
        # comparison P -> sk_k X
        cmp_val = {n: {} for n in range(X.N + 1)}
        ok_welldef = True
        for n in range(X.N + 1):
            for i, QB in enumerate(parts_B):
                for sid in QB.level(n):
                    pid = into_B.mapping[n][f"{i}:{sid}"]
                    val = X.act(parse_morphism(sid), attach_data[i].id)
                    if cmp_val[n].setdefault(pid, val) != val:
                        ok_welldef = False
            for sid in prev.level(n):
                pid = into_C.mapping[n][sid]
                if cmp_val[n].setdefault(pid, sid) != sid:
                    ok_welldef = False
        report.check("comparison well-defined", ok_welldef)
        for n in range(X.N + 1):
            values = list(cmp_val[n].values())
            total = set(P.level(n)) == set(cmp_val[n])
            inj = len(set(values)) == len(values)
            surj = set(values) == set(sk_k.level(n))
            report.check(
                f"level {n} bijection",
                total and inj and surj,
                f"|P|={len(P.level(n))} |sk|={len(sk_k.level(n))}",
            )
    else:
        for n in range(X.N + 1):
            report.check(
                f"level {n} bijection",
                set(prev.level(n)) == set(sk_k.level(n)),
                "no cells to attach",
            )
    return report


# -- skeletal extension, both routes -----------------------------------------


def extend_level(X: SkeletalPresheaf, n: int):
    """The level-n sections of the skeletal extension, via EZ pairs.

    Returns (ids, pair map) where ids are canonical "epi|nondegenerate"
    strings.  extend_to uses the same construction; coend_level is the
    independent route.
    """
    if n <= X.N:
        raise BadDimension(f"level {n} is already stored")
    if X.truncated:
        raise TruncationMismatch(f"{X.name} is truncated")
    Y = X.extend_to(n)
    ids = Y.level(n)
    return ids, {pid: _split_pair(pid) for pid in ids}


def _split_pair(pid: str):
    sigma_str, _, yid = pid.partition("|")
    return parse_morphism(sigma_str), yid


def coend_level(X: SkeletalPresheaf, n: int):
    """Level n of the left Kan extension as a colimit: pairs (g, x) with
    g: [n] -> [m], x in X_m, modulo naturality relations, by union-find."""
    if X.truncated:
        raise TruncationMismatch(f"{X.name} is truncated")
    uf = _UnionFind()
    for m in range(X.N + 1):
        for g in enumerate_hom(n, m, X.site):
            for sid in X.level(m):
                uf.add((str(g), sid))
    for _, u in generator_morphisms(X.site, X.N):
        # (u o g, x) ~ (g, act(u)(x)) for g: [n] -> [u.src]
        for g in enumerate_hom(n, u.src, X.site):
            ug = str(compose(u, g))
            gs = str(g)
            for xid in X.level(u.dst):
                uf.union((ug, xid), (gs, X.act(u, xid)))
    return [frozenset(v) for v in sorted(sorted(c) for c in uf.classes().values())]


def extension_methods_agree(X: SkeletalPresheaf, n: int) -> bool:
    """The EZ-pair sections biject with the coend classes, the pair of a
    section lying in its own class."""
    ids, pairs = extend_level(X, n)
    classes = coend_level(X, n)
    class_of = {}
    for c in classes:
        for member in c:
            class_of[member] = c
    hit = set()
    for pid in ids:
        e, yid = pairs[pid]
        c = class_of.get((str(e), yid))
        if c is None or c in hit:
            return False
        hit.add(c)
    return len(hit) == len(classes)


def restrict_skeletal(X: SkeletalPresheaf, k: int) -> SkeletalPresheaf:
    """The first k levels reread as a skeletal presheaf, i.e. the data
    whose extension is sk_k X."""
    k = min(k, X.N)
    levels = {n: X.level(n) for n in range(k + 1)}
    action = {g: dict(X.action[g]) for _, g in generator_morphisms(X.site, k)}
    return SkeletalPresheaf(X.site, k, levels, action, f"res{k}_{X.name}")


def verify_restriction_roundtrip(X: SkeletalPresheaf, k: int) -> bool:
    """Extending the k-truncation back to the stored range reproduces
    the k-skeleton levelwise, via the evaluation of the extension pairs."""
    ext = restrict_skeletal(X, k).extend_to(X.N)
    skX, _ = skeleton(X, k)
    for n in range(min(k, X.N) + 1, X.N + 1):
        values = []
        for pid in ext.level(n):
            e, yid = _split_pair(pid)
            values.append(X.act(e, yid))
        if len(set(values)) != len(values) or set(values) != set(skX.level(n)):
            return False
    return True


def verify_ez_groupoid(X: SkeletalPresheaf, max_level: int = 3) -> Report:
    """Any two (epi, nondegenerate) decompositions of a section are
    related by exactly one cosymmetry."""
    report = Report(f"ez-groupoid({X.name})")
    top = min(max_level, X.N)
    for r in range(top + 1):
        nd_by_level = {
            m: nondegenerate_sections(X, m) for m in range(r + 1)
        }
        decomps: dict[str, list[tuple[Morphism, SectionRef]]] = {
            x: [] for x in X.level(r)
        }
        for m in range(r + 1):
            for e in enumerate_hom(r, m, X.site):
                if not classify(e).is_epi:
                    continue
                table = X.table(e)
                for y in nd_by_level[m]:
                    decomps[table[y.id]].append((e, y))
        ok = True
        for x, ds in decomps.items():
            for (s1, y1), (s2, y2) in itertools.product(ds, repeat=2):
                if y1.level != y2.level:
                    ok = False
                    break
                count = sum(
                    1
                    for th in _cosymmetry_perms(X.site, y1.level)
                    if compose(pi(th), s1) == s2
                    and X.act(pi(th), y2.id) == y1.id
                )
                if count != 1:
                    ok = False
                    break
            if not ok:
                break
        report.check(f"level {r} decompositions connected uniquely", ok)
    return report


# -- functoriality audit -----------------------------------------------------


def verify_functorial(X: SkeletalPresheaf, triples: bool = True) -> Report:
    """Action respects all two-letter (and optionally three-letter)
    generator words against their normal forms."""
    report = Report(f"functorial({X.name})")
    named = generator_morphisms(X.site, X.N)
    gens = [g for _, g in named]
    name_of = {g: gname for gname, g in named}

    def word_action(word, x):
        for g in word:
            x = X.action[g][x]
        return x

    def check_word(word):
        m = word[0]
        for g in word[1:]:
            m = compose(m, g)
        ok = all(
            word_action(word, x) == X.act(m, x) for x in X.level(m.dst)
        )
        label = " o ".join(name_of[g] for g in word)
        return report.check(label, ok)

    for g1, g2 in itertools.product(gens, repeat=2):
        if g1.src == g2.dst:
            check_word([g1, g2])
    if triples:
        for g1, g2 in itertools.product(gens, repeat=2):
            if g1.src != g2.dst:
                continue
            for g3 in gens:
                if g2.src == g3.dst:
                    check_word([g1, g2, g3])
    return report


# -- text and JSON serialization ---------------------------------------------


def dumps_presheaf(X: SkeletalPresheaf) -> str:
    lines = [f"site: {X.site}", f"truncation: {X.N}"]
    for n in range(X.N + 1):
        lines.append(f"level {n}: " + " ".join(X.level(n)))
    for gname, g in generator_morphisms(X.site, X.N):
        lines.append(f"{gname}:")
        for x in X.level(g.dst):
            lines.append(f"  {x} -> {X.action[g][x]}")
    return "\n".join(lines) + "\n"


def dumps_presheaf_json(X: SkeletalPresheaf) -> str:
    return json.dumps(
        {
            "site": str(X.site),
            "truncation": X.N,
            "levels": {str(n): list(X.level(n)) for n in range(X.N + 1)},
            "action": {
                gname: X.action[g]
                for gname, g in generator_morphisms(X.site, X.N)
            },
        },
        indent=2,
    )


def loads_presheaf(text: str, name: str = "loaded") -> SkeletalPresheaf:
    """Parse the text or JSON presheaf format, validate structure and
    the relation instances; raise InputError with the first failure."""
    text = text.strip()
    if text.startswith("{"):
        data = json.loads(text)
        site_tag = SiteTag.parse(data["site"])
        N = int(data["truncation"])
        levels = {int(n): tuple(ids) for n, ids in data["levels"].items()}
        action = {
            parse_generator_name(gname, site_tag): dict(table)
            for gname, table in data["action"].items()
        }
    else:
        site_tag, N = None, None
        levels, action = {}, {}
        current = None
        for raw in text.splitlines():
            line = raw.rstrip()
            if not line.strip() or line.strip().startswith("#"):
                continue
            stripped = line.strip()
            if stripped.startswith("site:"):
                site_tag = SiteTag.parse(stripped.split(":", 1)[1])
            elif stripped.startswith("truncation:"):
                N = int(stripped.split(":", 1)[1])
            elif stripped.startswith("level "):
                head, _, rest = stripped.partition(":")
                n = int(head.split()[1])
                levels[n] = tuple(rest.split())
            elif line.startswith((" ", "\t")) and "->" in stripped:
                if current is None:
                    raise InputError(f"action pair outside a block: {stripped!r}")
                x, _, v = stripped.partition(" -> ")
                action[current][x.strip()] = v.strip()
            elif stripped.endswith(":"):
                if site_tag is None:
                    raise InputError("generator block before site header")
                current = parse_generator_name(stripped[:-1], site_tag)
                action.setdefault(current, {})
            else:
                raise InputError(f"cannot parse line {stripped!r}")
        if site_tag is None or N is None:
            raise InputError("missing site or truncation header")
    X = SkeletalPresheaf(site_tag, N, levels, action, name)
    audit = verify_functorial(X)
    if not audit.ok:
        first = audit.failures[0]
        raise InputError(f"relation violated by action: {first.label}")
    return X
