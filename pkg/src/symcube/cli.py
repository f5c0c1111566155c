"""Command-line interface over the whole library.

Exit statuses: 0 on success, 1 when a verification report has a failing
entry, 2 on malformed input, 3 when a resource bound is hit.  All output
is deterministic for a given invocation; --json switches every command to
a machine-readable mirror with stable field names.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import InputError, ResourceBound
from .homotopy import (
    LiftingProblem,
    cap_inclusion,
    contraction_H,
    find_homotopy,
    is_fibrant,
    solve_lifting,
)
from .monoidal import (
    braiding_comparison,
    convolve,
    pairing_map,
    restrict,
    symmetrize,
    symmetrize_comparison,
    symmetrize_structure,
    unit_comparison,
    verify_triangle_identities,
)
from .presheaf import (
    PresheafMap,
    Permutation,
    SkeletalPresheaf,
    SubgroupSpec,
    boundary,
    cap,
    coskeleton,
    empty_presheaf,
    hom_presheaf,
    identity_map,
    loads_presheaf,
    pushout,
    quotient_presheaf,
    representable,
    skeleton,
    terminal_map,
    verify_ez_groupoid,
    verify_skeletal_pushout,
)
from .realize import (
    euler_characteristic,
    homology,
    realize,
    verify_act_naturality,
    verify_cubical_monoid_delta1,
    verify_snf,
)
from .report import Report
from .site import (
    SiteTag,
    compose,
    enumerate_hom,
    factor,
    parse_morphism,
    tensor,
    verify_ez,
    verify_relations,
    verify_split_pushouts,
)

DEFAULT_LIMIT = 1_000_000


# -- argument handling -------------------------------------------------------


def _site(args) -> SiteTag:
    return SiteTag.parse(args.site)


def load_spec(spec: str, site: SiteTag, limit: int) -> SkeletalPresheaf:
    """A presheaf from a builtin description or a file path.

    Builtins: point, empty, cube:N, boundary:N, cap:N:J:E,
    quotient:N:CYCLES (orbits of the symmetric cube under the subgroup
    generated by the cycles).  Anything else is read as a file in the
    presheaf text or JSON format, which carries its own site.
    """
    head, _, rest = spec.partition(":")
    try:
        if spec == "point":
            return representable(0, site)
        if spec == "empty":
            return empty_presheaf(site, 0)
        if head == "cube":
            return representable(int(rest), site)
        if head == "boundary":
            return boundary(int(rest), site)[0]
        if head == "cap":
            n, j, eps = (int(p) for p in rest.split(":"))
            return cap(n, j, eps, site)[0]
        if head == "quotient":
            n_text, _, cycles = rest.partition(":")
            n = int(n_text)
            if site is not SiteTag.QSIGMA:
                raise InputError("quotients act through the symmetric site")
            group = SubgroupSpec(n, (Permutation.from_cycles(cycles, n),))
            return quotient_presheaf(representable(n, site), group)[0]
    except ValueError as exc:
        raise InputError(f"malformed presheaf spec {spec!r}: {exc}") from exc
    path = Path(spec)
    if not path.exists():
        raise InputError(f"unknown presheaf spec and no such file: {spec!r}")
    return loads_presheaf(path.read_text(), name=path.stem)


def load_map_spec(spec: str, site: SiteTag, limit: int) -> PresheafMap:
    """A named map: boundary:N (inclusion), cap:N:J:E (inclusion, via the
    symmetrization when the site is symmetric), identity:SPEC,
    terminal:SPEC, empty:SPEC."""
    head, _, rest = spec.partition(":")
    try:
        if head == "boundary":
            return boundary(int(rest), site)[1]
        if head == "cap":
            n, j, eps = (int(p) for p in rest.split(":"))
            if site is SiteTag.QSIGMA:
                return cap_inclusion(n, j, eps, limit)[1]
            return cap(n, j, eps, site)[1]
        if head == "identity":
            return identity_map(load_spec(rest, site, limit))
        if head == "terminal":
            return terminal_map(load_spec(rest, site, limit))
        if head == "empty":
            X = load_spec(rest, site, limit)
            empty = empty_presheaf(site, 0)
            return PresheafMap(empty, X, {0: {}})
    except ValueError as exc:
        raise InputError(f"malformed map spec {spec!r}: {exc}") from exc
    raise InputError(f"unknown map spec {spec!r}")


# -- output helpers ----------------------------------------------------------


def _print_json(payload):
    print(json.dumps(payload, indent=2, sort_keys=True))


def _emit_morphism(args, result) -> int:
    if args.json:
        _print_json({"result": str(result)})
    else:
        print(str(result))
    return 0


def _emit_object(args, X: SkeletalPresheaf, extra: dict | None = None) -> int:
    counts = {str(n): len(X.level(n)) for n in range(X.N + 1)}
    if args.json:
        payload = {"name": X.name, "site": str(X.site), "levels": counts}
        payload.update(extra or {})
        _print_json(payload)
    else:
        cells = " ".join(f"{n}:{c}" for n, c in counts.items())
        print(f"{X.name} [{X.site}] {cells}")
        for key, value in (extra or {}).items():
            print(f"{key}: {value}")
    return 0


def _emit_report(args, rep: Report) -> int:
    if args.json:
        _print_json(rep.to_json())
    else:
        print(rep.summary())
        for entry in rep.entries:
            print(f"  {entry}")
    return 0 if rep.ok else 1


# -- morphism commands -------------------------------------------------------


def _cmd_compose(args) -> int:
    f = parse_morphism(args.f)
    g = parse_morphism(args.g)
    return _emit_morphism(args, compose(f, g))


def _cmd_factor(args) -> int:
    f = parse_morphism(args.f)
    fac = factor(f)
    assert fac.evaluate() == f
    if args.json:
        _print_json(
            {
                "normal_form": str(fac),
                "faces": [list(p) for p in fac.faces],
                "conjs": list(fac.conjs),
                "perm": list(fac.perm.one_line),
                "degens": list(fac.degens),
                "source": fac.src,
                "target": fac.dst,
            }
        )
    else:
        print(str(fac))
    return 0


def _cmd_tensor(args) -> int:
    return _emit_morphism(
        args, tensor(parse_morphism(args.f), parse_morphism(args.g))
    )


def _cmd_enum_hom(args) -> int:
    fs = [str(f) for f in enumerate_hom(args.m, args.n, _site(args), args.limit)]
    if args.json:
        _print_json({"count": len(fs), "morphisms": fs})
    else:
        print(f"{len(fs)} morphisms {args.m} -> {args.n} over {_site(args)}")
        for s in fs:
            print(s)
    return 0


# -- verification commands ---------------------------------------------------


def _cmd_verify_relations(args) -> int:
    return _emit_report(args, verify_relations(args.dim))


def _cmd_verify_ez(args) -> int:
    return _emit_report(args, verify_ez(args.dim))


def _cmd_verify_pushouts(args) -> int:
    return _emit_report(args, verify_split_pushouts(args.dim))


# -- presheaf commands -------------------------------------------------------


def _cmd_convolve(args) -> int:
    X = load_spec(args.left, _site(args), args.limit)
    Y = load_spec(args.right, _site(args), args.limit)
    cr = convolve(X, Y, args.limit)
    return _emit_object(args, cr.product)


def _cmd_symmetrize(args) -> int:
    X = load_spec(args.spec, SiteTag.Q, args.limit)
    return _emit_object(args, symmetrize(X, args.limit))


def _cmd_restrict(args) -> int:
    X = load_spec(args.spec, SiteTag.QSIGMA, args.limit)
    bound = X.N if args.dim is None else args.dim
    return _emit_object(args, restrict(X, bound, args.limit))


def _cmd_skeleton(args) -> int:
    X = load_spec(args.spec, _site(args), args.limit)
    return _emit_object(args, skeleton(X, args.k)[0])


def _cmd_coskeleton(args) -> int:
    X = load_spec(args.spec, _site(args), args.limit)
    return _emit_object(args, coskeleton(X, args.k))


def _cmd_quotient(args) -> int:
    X = load_spec(args.spec, SiteTag.QSIGMA, args.limit)
    ambient = parse_morphism(X.level(0)[0]).dst
    group = SubgroupSpec(
        ambient, (Permutation.from_cycles(args.cycles, ambient),)
    )
    return _emit_object(args, quotient_presheaf(X, group)[0])


def _cmd_boundary(args) -> int:
    return _emit_object(args, boundary(args.n, _site(args))[0])


def _cmd_cap(args) -> int:
    return _emit_object(args, cap(args.n, args.j, args.eps, _site(args))[0])


def _cmd_realize(args) -> int:
    X = load_spec(args.spec, _site(args), args.limit)
    S = realize(X)
    nondeg = {
        str(k): len(S.nondegenerate(k)) for k in range(len(S.levels))
    }
    counts = {str(k): len(S.levels[k]) for k in range(len(S.levels))}
    if args.json:
        _print_json(
            {
                "name": S.name,
                "levels": counts,
                "nondegenerate": nondeg,
                "euler": euler_characteristic(S),
            }
        )
    else:
        cells = " ".join(f"{k}:{c}" for k, c in counts.items())
        nd = " ".join(f"{k}:{c}" for k, c in nondeg.items())
        print(f"{S.name} {cells}")
        print(f"nondegenerate {nd}")
        print(f"euler {euler_characteristic(S)}")
    return 0


def _cmd_homology(args) -> int:
    if (args.spec is None) == (args.file is None):
        raise InputError("give exactly one of a presheaf spec or --file")
    spec = args.spec if args.spec is not None else args.file
    X = load_spec(spec, _site(args), args.limit)
    res = homology(X)
    if args.json:
        _print_json(
            {
                "name": X.name,
                "groups": [
                    {"degree": k, "betti": b, "torsion": list(t)}
                    for k, (b, t) in enumerate(res.groups)
                ],
            }
        )
    else:
        print(res.pretty())
    return 0


# -- homotopy commands -------------------------------------------------------


def _cmd_lift(args) -> int:
    site = _site(args)
    left = load_map_spec(args.left, site, args.limit)
    right = load_map_spec(args.right, site, args.limit)
    tops = hom_presheaf(left.src, right.src, args.limit)
    bottoms = hom_presheaf(left.dst, right.dst, args.limit)
    rep = Report(f"right lifting property of {args.right} against {args.left}")
    squares = 0
    for ti, top in enumerate(tops):
        for bi, bottom in enumerate(bottoms):
            problem = LiftingProblem(left, right, top, bottom)
            if not problem.commutes():
                continue
            squares += 1
            filler = solve_lifting(problem, args.limit)
            rep.check(
                f"square top[{ti}] bottom[{bi}]",
                filler is not None,
                "filled" if filler is not None else "no filler",
            )
    rep.check("commuting squares found", True, str(squares))
    return _emit_report(args, rep)


def _cmd_fibrant(args) -> int:
    X = load_spec(args.spec, SiteTag.QSIGMA, args.limit)
    return _emit_report(args, is_fibrant(X, args.dim, args.limit))


def _cmd_homotopic(args) -> int:
    X = load_spec(args.spec, SiteTag.QSIGMA, args.limit)
    for v in (args.start, args.end):
        if v not in X.level(0):
            raise InputError(f"{v!r} is not a vertex of {X.name}")
    pt = representable(0, SiteTag.QSIGMA)
    base = pt.level(0)[0]
    f = PresheafMap(pt, X, {0: {base: args.start}})
    g = PresheafMap(pt, X, {0: {base: args.end}})
    h = find_homotopy(f, g, args.dim, args.limit)
    rep = Report(f"homotopy between {args.start} and {args.end} in {X.name}")
    rep.check(
        "homotopy found",
        h is not None and h.verify(),
        f"cylinder dimension {args.dim}",
    )
    return _emit_report(args, rep)


# -- verify-all --------------------------------------------------------------


def _suite_convolution(dim: int, limit: int) -> Report:
    rep = Report("convolution")
    qs = SiteTag.QSIGMA
    for m in range(dim + 1):
        for n in range(dim + 1 - m):
            cr = convolve(representable(m, qs), representable(n, qs), limit)
            pm = pairing_map(cr, representable(m + n, qs))
            rep.check(
                f"cube{m} (x) cube{n} pairs onto cube{m + n}",
                pm.is_bijective() and pm.verify_natural(),
            )
    cr = convolve(representable(1, qs), representable(0, qs), limit)
    rep.check("unit law on the interval", unit_comparison(cr).is_bijective())
    if dim >= 2:
        cr = convolve(representable(1, qs), representable(1, qs), limit)
        br = braiding_comparison(cr, cr)
        rep.check(
            "braiding on the square", br.is_bijective() and br.verify_natural()
        )
    return rep


def _suite_symmetrization(dim: int, limit: int) -> Report:
    rep = Report("symmetrization")
    qs = SiteTag.QSIGMA
    for n in range(dim + 1):
        s = symmetrize_structure(representable(n, SiteTag.Q), limit)
        cmp = symmetrize_comparison(s, representable(n, qs))
        rep.check(
            f"transported cube{n} is the symmetric cube",
            cmp.is_bijective() and cmp.verify_natural(),
        )
    for n in range(1, dim + 1):
        s = symmetrize_structure(boundary(n, SiteTag.Q)[0], limit)
        cmp = symmetrize_comparison(s, representable(n, qs))
        target = boundary(n, qs)[0]
        hit = all(
            sorted(cmp.mapping[k].values()) == sorted(target.level(k))
            for k in range(target.N + 1)
        )
        rep.check(
            f"transported boundary{n} is the symmetric boundary",
            cmp.is_injective() and cmp.verify_natural() and hit,
        )
    tri = verify_triangle_identities(
        representable(1, qs), min(dim, 3), limit
    )
    rep.check("triangle identities on the interval", tri.ok, tri.summary())
    return rep


def _suite_homology(dim: int) -> Report:
    rep = Report("homology")
    qs = SiteTag.QSIGMA
    for n in range(min(dim, 3) + 1):
        res = homology(representable(n, qs))
        rep.check(f"cube{n} has point homology", res.groups == ((1, ()),))
    if dim >= 2:
        res = homology(boundary(2, qs)[0])
        rep.check("boundary2 is a circle", res.groups == ((1, ()), (1, ())))
        bd1, incl = boundary(1, qs)
        circle = pushout(incl, terminal_map(bd1))[0]
        res = homology(circle)
        rep.check(
            "collapsed interval is a circle", res.groups == ((1, ()), (1, ()))
        )
    if dim >= 3:
        res = homology(boundary(3, qs)[0])
        rep.check(
            "boundary3 is a sphere", res.groups == ((1, ()), (0, ()), (1, ()))
        )
    return rep


def _suite_snf() -> Report:
    rep = Report("smith normal form")
    battery = [
        [[2, 4], [6, 8]],
        [[0, 0], [0, 0]],
        [[1, 0, -1], [0, 2, 2]],
        [[6], [10]],
    ]
    for M in battery:
        r = verify_snf(M)
        rep.check(f"matrix {M}", r.ok, r.summary())
    return rep


def _suite_skeletal(dim: int) -> Report:
    rep = Report("skeletal pushouts")
    qs = SiteTag.QSIGMA
    square = representable(2, qs)
    swap = SubgroupSpec(2, (Permutation.transposition(1, 2, 2),))
    objs = [
        square,
        quotient_presheaf(square, swap, "swapquot")[0],
        boundary(3, qs)[0],
    ]
    for X in objs:
        for k in range(min(dim, X.N) + 1):
            r = verify_skeletal_pushout(X, k)
            rep.check(f"sk{k} square for {X.name}", r.ok, r.summary())
    return rep


def _suite_homotopy(dim: int, limit: int) -> Report:
    rep = Report("homotopy")
    qs = SiteTag.QSIGMA
    for n in range(1, min(dim + 1, 4) + 1):
        _, r = contraction_H(n)
        rep.check(f"contraction of the {n}-cube", r.ok)
    pt = representable(0, qs)
    base = pt.level(0)[0]
    interval = representable(1, qs)
    f = PresheafMap(pt, interval, {0: {base: "(0):0->1"}})
    g = PresheafMap(pt, interval, {0: {base: "(1):0->1"}})
    h = find_homotopy(f, g, 1, limit)
    rep.check("interval endpoints homotopic", h is not None and h.verify())
    bd1 = boundary(1, qs)[0]
    f = PresheafMap(pt, bd1, {0: {base: "(0):0->1"}})
    g = PresheafMap(pt, bd1, {0: {base: "(1):0->1"}})
    rep.check(
        "separated endpoints not homotopic",
        find_homotopy(f, g, 1, limit) is None,
    )
    fib = is_fibrant(pt, min(dim, 2), limit)
    rep.check("the point fills every cap", fib.ok, fib.summary())
    return rep


def _cmd_verify_all(args) -> int:
    dim = args.dim
    limit = args.limit
    suites = [
        verify_relations(dim + 1),
        verify_ez(dim),
        verify_split_pushouts(dim + 1),
        verify_ez_groupoid(representable(2, SiteTag.QSIGMA), 2),
        _suite_skeletal(dim),
        verify_act_naturality(),
        _suite_convolution(dim, limit),
        _suite_symmetrization(dim, limit),
        _suite_homology(dim),
        _suite_snf(),
        verify_cubical_monoid_delta1(dim),
        _suite_homotopy(dim, limit),
    ]
    overall = Report(f"verify-all at dimension {dim}")
    for suite in suites:
        overall.check(
            suite.name,
            suite.ok,
            f"{len(suite.entries) - len(suite.failures)}/{len(suite.entries)}",
        )
    if args.json:
        _print_json(
            {
                "name": overall.name,
                "ok": overall.ok,
                "suites": [s.to_json() for s in suites],
            }
        )
    else:
        print(overall.summary())
        for suite in suites:
            print(f"  {suite.summary()}")
            for entry in suite.failures:
                print(f"    {entry}")
    return 0 if overall.ok else 1


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symcube",
        description="Exact computation in the classical and symmetric cube "
        "categories and their presheaves.",
    )
    parser.add_argument(
        "--site",
        choices=["Q", "QSigma"],
        default="QSigma",
        help="which cube category builtin objects live over",
    )
    parser.add_argument(
        "--limit",
        type=int,
        default=DEFAULT_LIMIT,
        help="resource bound on enumerations",
    )
    parser.add_argument(
        "--json", action="store_true", help="machine-readable output"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compose", help="compose two morphisms (first after second)")
    p.add_argument("f")
    p.add_argument("g")
    p.set_defaults(fn=_cmd_compose)

    p = sub.add_parser("factor", help="canonical normal form of a morphism")
    p.add_argument("f")
    p.set_defaults(fn=_cmd_factor)

    p = sub.add_parser("tensor", help="monoidal product of two morphisms")
    p.add_argument("f")
    p.add_argument("g")
    p.set_defaults(fn=_cmd_tensor)

    p = sub.add_parser("enum-hom", help="list a hom set in canonical order")
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)
    p.set_defaults(fn=_cmd_enum_hom)

    p = sub.add_parser("verify-relations", help="check the presentation relations")
    p.add_argument("--dim", type=int, default=4)
    p.set_defaults(fn=_cmd_verify_relations)

    p = sub.add_parser("verify-ez", help="check the epi/mono factorization structure")
    p.add_argument("--dim", type=int, default=3)
    p.set_defaults(fn=_cmd_verify_ez)

    p = sub.add_parser("verify-pushouts", help="check the split pushout squares")
    p.add_argument("--dim", type=int, default=4)
    p.set_defaults(fn=_cmd_verify_pushouts)

    p = sub.add_parser("convolve", help="convolution product of two presheaves")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(fn=_cmd_convolve)

    p = sub.add_parser("symmetrize", help="transport a classical presheaf")
    p.add_argument("spec")
    p.set_defaults(fn=_cmd_symmetrize)

    p = sub.add_parser("restrict", help="underlying classical presheaf")
    p.add_argument("spec")
    p.add_argument("--dim", type=int, default=None)
    p.set_defaults(fn=_cmd_restrict)

    p = sub.add_parser("skeleton", help="subpresheaf generated below a level")
    p.add_argument("spec")
    p.add_argument("k", type=int)
    p.set_defaults(fn=_cmd_skeleton)

    p = sub.add_parser("coskeleton", help="right adjoint to truncation")
    p.add_argument("spec")
    p.add_argument("k", type=int)
    p.set_defaults(fn=_cmd_coskeleton)

    p = sub.add_parser("quotient", help="orbit presheaf under a permutation group")
    p.add_argument("spec")
    p.add_argument("cycles", help="cycle notation, e.g. '(1 2)'")
    p.set_defaults(fn=_cmd_quotient)

    p = sub.add_parser("boundary", help="union of the proper faces")
    p.add_argument("n", type=int)
    p.set_defaults(fn=_cmd_boundary)

    p = sub.add_parser("cap", help="faces minus one, the open box")
    p.add_argument("n", type=int)
    p.add_argument("j", type=int)
    p.add_argument("eps", type=int, choices=[0, 1])
    p.set_defaults(fn=_cmd_cap)

    p = sub.add_parser("realize", help="simplicial realization sizes")
    p.add_argument("spec")
    p.set_defaults(fn=_cmd_realize)

    p = sub.add_parser("homology", help="integral homology of the realization")
    p.add_argument("spec", nargs="?")
    p.add_argument("--file", default=None, help="presheaf file to read")
    p.set_defaults(fn=_cmd_homology)

    p = sub.add_parser("lift", help="right lifting property over all squares")
    p.add_argument("left", help="map spec, e.g. cap:2:1:0 or boundary:1")
    p.add_argument("right", help="map spec, e.g. terminal:cube:1")
    p.set_defaults(fn=_cmd_lift)

    p = sub.add_parser("fibrant", help="cap filling report")
    p.add_argument("spec")
    p.add_argument("--dim", type=int, default=1)
    p.set_defaults(fn=_cmd_fibrant)

    p = sub.add_parser("homotopic", help="search for a homotopy between vertices")
    p.add_argument("spec")
    p.add_argument("start")
    p.add_argument("end")
    p.add_argument("--dim", type=int, default=1)
    p.set_defaults(fn=_cmd_homotopic)

    p = sub.add_parser("verify-all", help="every exhaustive suite at one bound")
    p.add_argument("--dim", type=int, default=3)
    p.set_defaults(fn=_cmd_verify_all)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except ResourceBound as exc:
        print(f"resource bound: {exc}", file=sys.stderr)
        return 3
    except (InputError, FileNotFoundError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


def main():
    raise SystemExit(run())


if __name__ == "__main__":
    main()
