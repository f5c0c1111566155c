"""Lifting, cap filling, and interval homotopies."""

import pytest

from symcube.errors import InputError, ResourceBound
from symcube.homotopy import (
    Homotopy,
    LiftingProblem,
    cap_inclusion,
    contraction_H,
    cylinder,
    find_homotopy,
    is_fibrant,
    projection_homotopy,
    solve_lifting,
)
from symcube.presheaf import (
    PresheafMap,
    boundary,
    empty_presheaf,
    extension_methods_agree,
    identity_map,
    representable,
    terminal_map,
)
from symcube.site import (
    Conj,
    SiteTag,
    compose,
    factor,
    parse_morphism,
)

QS = SiteTag.QSIGMA

R0 = representable(0, QS)
R1S = representable(1, QS)
R2S = representable(2, QS)
BD1S, BD1S_INCL = boundary(1, QS)
PT = R0.level(0)[0]

V0 = "(0):0->1"
V1 = "(1):0->1"


def vertex_map(target, v):
    return PresheafMap(R0, target, {0: {PT: v}})


# -- the contracting conjunction ---------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_contraction_shape(n):
    h, _ = contraction_H(n)
    assert h.src == 2 * n and h.dst == n
    assert h.entries == tuple(Conj((i, n + i)) for i in range(1, n + 1))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_contraction_endpoint_identities(n):
    _, rep = contraction_H(n)
    assert rep.ok
    assert len(rep.entries) == 2


def test_contraction_worked_example():
    h, _ = contraction_H(1)
    assert str(h) == "(x1^x2):2->1"
    assert str(compose(h, parse_morphism("(x1,0):1->2"))) == "(0):1->1"
    assert str(compose(h, parse_morphism("(x1,1):1->2"))) == "(x1):1->1"


def test_contraction_normal_form():
    h, _ = contraction_H(2)
    fac = factor(h)
    assert not fac.perm.is_identity()
    assert len(fac.conjs) == 2
    assert fac.faces == () and fac.degens == ()
    assert fac.evaluate() == h


def test_contraction_rejects_nonpositive():
    with pytest.raises(InputError):
        contraction_H(0)


# -- cylinders ---------------------------------------------------------------


def test_cylinder_of_point_is_an_interval():
    cr, e0, e1 = cylinder(R0, 1)
    assert cr.product.size() == (2, 3)
    assert e0.mapping[0][PT] != e1.mapping[0][PT]
    assert e0.verify_natural() and e1.verify_natural()


def test_cylinder_endpoints_are_injective():
    cr, e0, e1 = cylinder(BD1S, 1)
    assert e0.is_injective() and e1.is_injective()
    assert set(e0.mapping[0].values()).isdisjoint(e1.mapping[0].values())
    assert cr.product.N == BD1S.N + 1


def test_cylinder_rejects_negative_dimension():
    with pytest.raises(InputError):
        cylinder(R0, -1)


# -- homotopy search ---------------------------------------------------------


def test_interval_endpoints_homotopic():
    h = find_homotopy(vertex_map(R1S, V0), vertex_map(R1S, V1), 1)
    assert h is not None
    assert h.n == 1
    assert h.verify()


def test_boundary_endpoints_not_homotopic():
    assert find_homotopy(vertex_map(BD1S, V0), vertex_map(BD1S, V1), 1) is None


def test_search_finds_self_homotopy():
    assert find_homotopy(BD1S_INCL, BD1S_INCL, 1) is not None
    ident = identity_map(R1S)
    assert find_homotopy(ident, ident, 1) is not None


def test_projection_homotopy_restricts_to_its_map():
    pr = projection_homotopy(BD1S_INCL, 1)
    assert pr.verify()
    assert pr.source is BD1S_INCL and pr.target is BD1S_INCL
    assert pr.h.verify_natural()


def test_projection_homotopy_on_a_vertex():
    pr = projection_homotopy(vertex_map(R1S, V1), 1)
    assert pr.verify()
    # the whole cylinder collapses onto the chosen vertex
    assert set(pr.h.mapping[0].values()) == {V1}


def test_homotopy_verify_detects_wrong_endpoint():
    h = find_homotopy(vertex_map(R1S, V0), vertex_map(R1S, V1), 1)
    tampered = Homotopy(1, h.h, h.source, h.source, h.start, h.end)
    assert not tampered.verify()


def test_homotopy_source_mismatch_rejected():
    with pytest.raises(InputError):
        find_homotopy(BD1S_INCL, identity_map(R1S), 1)


def test_homotopy_target_mismatch_rejected():
    with pytest.raises(InputError):
        find_homotopy(vertex_map(R1S, V0), vertex_map(BD1S, V0), 1)


def test_homotopy_search_respects_limit():
    with pytest.raises(ResourceBound):
        find_homotopy(vertex_map(R1S, V0), vertex_map(R1S, V1), 1, limit=1)


# -- lifting problems --------------------------------------------------------


def test_lifting_against_identity_returns_bottom():
    p = LiftingProblem(BD1S_INCL, identity_map(R1S), BD1S_INCL, identity_map(R1S))
    w = solve_lifting(p)
    assert w is not None
    assert w.mapping == identity_map(R1S).mapping


def test_lifting_point_under_interval():
    t = terminal_map(R1S)
    star = t.dst.level(0)[0]
    p = LiftingProblem(
        PresheafMap(empty_presheaf(QS, 0), R0, {0: {}}),
        t,
        PresheafMap(empty_presheaf(QS, 0), R1S, {0: {}}),
        PresheafMap(R0, t.dst, {0: {PT: star}}),
    )
    w = solve_lifting(p)
    assert w is not None
    # canonical order puts the zero vertex first
    assert w.mapping[0][PT] == V0


def test_lifting_cap_vertex_fills_by_a_constant():
    # the one-dimensional cap is the {1} vertex; against a discrete target
    # the constant map at the image vertex is always a filler
    box, incl = cap_inclusion(1, 1, 0)
    top = PresheafMap(
        box,
        BD1S,
        {0: {box.level(0)[0]: V1}, 1: {box.level(1)[0]: "(1):1->1"}},
    )
    p = LiftingProblem(incl, terminal_map(BD1S), top, terminal_map(R1S))
    w = solve_lifting(p)
    assert w is not None
    assert set(w.mapping[0].values()) == {V1}


def test_lifting_no_retraction_onto_boundary():
    p = LiftingProblem(
        BD1S_INCL, terminal_map(BD1S), identity_map(BD1S), terminal_map(R1S)
    )
    assert solve_lifting(p) is None


def test_lifting_filler_is_sound():
    p = LiftingProblem(BD1S_INCL, identity_map(R1S), BD1S_INCL, identity_map(R1S))
    w = solve_lifting(p)
    for n, row in BD1S_INCL.mapping.items():
        for a, b in row.items():
            assert w.mapping[n][b] == BD1S_INCL.mapping[n][a]


def test_lifting_rejects_noncommuting_square():
    flip = PresheafMap(
        BD1S,
        BD1S,
        {0: {V0: V1, V1: V0}, 1: {"(0):1->1": "(1):1->1", "(1):1->1": "(0):1->1"}},
    )
    assert flip.verify_natural()
    p = LiftingProblem(
        identity_map(BD1S), identity_map(BD1S), identity_map(BD1S), flip
    )
    with pytest.raises(InputError):
        solve_lifting(p)


def test_lifting_respects_limit():
    p = LiftingProblem(BD1S_INCL, identity_map(R1S), BD1S_INCL, identity_map(R1S))
    with pytest.raises(ResourceBound):
        solve_lifting(p, limit=0)


# -- cap inclusions and fibrancy ---------------------------------------------


def test_cap_inclusion_sizes_and_injectivity():
    box, incl = cap_inclusion(2, 1, 0)
    assert box.size() == (4, 7, 16)
    assert incl.is_injective()
    assert all(v in R2S.level(1) for v in incl.mapping[1].values())


def test_point_is_fibrant():
    rep = is_fibrant(R0, 2)
    assert rep.ok
    assert len(rep.entries) == 6


def test_two_point_object_is_fibrant():
    rep = is_fibrant(BD1S, 2)
    assert rep.ok
    assert [e.detail for e in rep.entries] == ["2 maps, 0 without extension"] * 6


def test_interval_cap_filling_report():
    # one-dimensional caps fill; every two-dimensional shape has exactly
    # two maps whose increasing edge meets constant-one walls, and the
    # single available connection cannot fill those
    rep = is_fibrant(R1S, 2)
    assert not rep.ok
    assert [e.ok for e in rep.entries] == [True, True, False, False, False, False]
    assert [e.detail for e in rep.entries[2:]] == ["7 maps, 2 without extension"] * 4


def test_fibrancy_guards():
    with pytest.raises(InputError):
        is_fibrant(representable(1, SiteTag.Q), 1)
    with pytest.raises(InputError):
        is_fibrant(R1S, -1)


# -- the two extension routes stay in agreement ------------------------------


@pytest.mark.parametrize(
    "X", [R1S, BD1S, boundary(2, QS)[0]], ids=lambda x: x.name
)
def test_extension_methods_agree_on_corpus(X):
    assert extension_methods_agree(X, X.N + 1)
