"""Exhaustive and example-based checks for the site layer.

Expected values below were derived by hand (composition tables, hom-set
counts, normal forms) before the implementation existed; they are frozen
here as regression oracles.
"""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symcube import site
from symcube.errors import (
    CompositionMismatch,
    IndexOutOfRange,
    MorphismSyntaxError,
    NotEpi,
    ResourceBound,
)
from symcube.site import (
    Conj,
    Const,
    Morphism,
    Permutation,
    SiteTag,
    classify,
    compose,
    delta,
    enumerate_factorizations,
    enumerate_hom,
    ez_factor,
    factor,
    gamma,
    hom_count,
    identity,
    parse_morphism,
    pi,
    sections_of,
    sigma,
    split_pushout,
    symmetry,
    tensor,
    verify_ez,
    verify_relations,
    verify_split_pushouts,
    vertices_action,
)

Q, QS = SiteTag.Q, SiteTag.QSIGMA


def all_morphisms(max_obj, site_tag=QS):
    for m in range(max_obj + 1):
        for n in range(max_obj + 1):
            yield from enumerate_hom(m, n, site_tag)


@st.composite
def morphisms(draw, max_src=5, max_dst=5):
    m = draw(st.integers(0, max_src))
    n = draw(st.integers(0, max_dst))
    avail = list(range(1, m + 1))
    entries = []
    for _ in range(n):
        kinds = ["const0", "const1"] + (["conj"] if avail else [])
        kind = draw(st.sampled_from(kinds))
        if kind == "const0":
            entries.append(Const(0))
        elif kind == "const1":
            entries.append(Const(1))
        else:
            length = draw(st.integers(1, len(avail)))
            chosen = draw(st.permutations(avail))[:length]
            for s in chosen:
                avail.remove(s)
            entries.append(Conj(chosen))
    return Morphism(m, n, entries)


# -- parsing and printing ----------------------------------------------------


def test_parse_print_round_trip_examples():
    for text in [
        "(x3,1,x1^x5^x2,0):5->4",
        "():0->0",
        "(0,1):0->2",
        "(x1,x2):2->2",
        "(x2^x1):2->1",
        "(1):0->1",
    ]:
        assert str(parse_morphism(text)) == text


def test_parse_tolerates_whitespace():
    f = parse_morphism("( x3 , 1 , x1 ^ x5 ^ x2 , 0 ) : 5 -> 4")
    assert str(f) == "(x3,1,x1^x5^x2,0):5->4"


@pytest.mark.parametrize(
    "bad",
    [
        "(x1,x2)",  # no arity
        "(x1&x2):2->1",
        "(x1^x1):1->1",  # repeated symbol
        "(x3):2->1",  # symbol out of range
        "(x1,x1):2->2",  # symbol reused across entries
        "(2):0->1",
        "x1:1->1",
        "(x1):1->2",  # wrong entry count
    ],
)
def test_parse_rejects(bad):
    with pytest.raises(MorphismSyntaxError):
        parse_morphism(bad)


@given(morphisms())
def test_parse_print_round_trip_random(f):
    assert parse_morphism(str(f)) == f


# -- generators --------------------------------------------------------------


def test_generator_examples():
    assert str(identity(0)) == "():0->0"
    assert str(identity(2)) == "(x1,x2):2->2"
    assert str(delta(2, 1, 2)) == "(x1,1,x2):2->3"
    assert str(gamma(1, 1)) == "(x1^x2):2->1"
    assert str(sigma(1, 1)) == "(x2):2->1"
    assert str(pi(Permutation((2, 1)))) == "(x2,x1):2->2"
    assert str(symmetry(1, 1)) == "(x2,x1):2->2"
    assert str(symmetry(2, 1)) == "(x3,x1,x2):3->3"


def test_generator_bounds():
    with pytest.raises(IndexOutOfRange):
        delta(0, 0, 2)
    with pytest.raises(IndexOutOfRange):
        delta(4, 1, 2)
    with pytest.raises(IndexOutOfRange):
        sigma(3, 1)
    with pytest.raises(IndexOutOfRange):
        gamma(2, 1)
    with pytest.raises(IndexOutOfRange):
        gamma(1, 0)


def test_generator_dispatcher():
    assert site.generator("delta", 2, 2, 1) == delta(2, 1, 2)
    assert site.generator("sigma", 1, 1) == sigma(1, 1)
    assert site.generator("gamma", 1, 1) == gamma(1, 1)
    assert site.generator("pi", 2, Permutation((2, 1))) == pi(Permutation((2, 1)))


# -- composition -------------------------------------------------------------


def test_worked_compositions():
    cases = [
        ("(x3,x1^x2):3->2", "(0,x1,x5):5->3", "(x5,0):5->2"),
        ("(x2^x1):2->1", "(x1^x2,x3):3->2", "(x3^x1^x2):3->1"),
        ("(x1^x2):2->1", "(1,1):0->2", "(1):0->1"),
        ("(0,x1^x4):5->2", "(x10,0,0,1,x3):10->5", "(0,x10):10->2"),
    ]
    for g, f, expected in cases:
        assert str(compose(parse_morphism(g), parse_morphism(f))) == expected


def test_compose_mismatch():
    with pytest.raises(CompositionMismatch):
        compose(parse_morphism("(x1):1->1"), parse_morphism("(x1,x2):2->2"))


def test_identity_laws_hom_2_3():
    for f in enumerate_hom(2, 3, QS):
        assert compose(identity(3), f) == f
        assert compose(f, identity(2)) == f


def test_associativity_exhaustive():
    rng = range(3)
    for a, b, c, d in itertools.product(rng, repeat=4):
        for f in enumerate_hom(a, b, QS):
            for g in enumerate_hom(b, c, QS):
                gf = compose(g, f)
                for h in enumerate_hom(c, d, QS):
                    assert compose(h, gf) == compose(compose(h, g), f)


# -- tensor ------------------------------------------------------------------


def test_tensor_example():
    f = parse_morphism("(x1^x2):2->1")
    g = parse_morphism("(0,x1):1->2")
    assert str(tensor(f, g)) == "(x1^x2,0,x3):3->3"


def test_tensor_unit():
    for f in enumerate_hom(2, 1, QS):
        assert tensor(f, identity(0)) == f
        assert tensor(identity(0), f) == f


def test_interchange_exhaustive():
    objs = range(3)
    all_maps = [f for f in all_morphisms(2)]
    tens = {}
    for f in all_maps:
        for g in all_maps:
            tens[f, g] = tensor(f, g)
    pairs = []  # (f1, f2, f1 o f2) with f2 applied first
    for a, b, c in itertools.product(objs, repeat=3):
        for f2 in enumerate_hom(a, b, QS):
            for f1 in enumerate_hom(b, c, QS):
                pairs.append((f1, f2, compose(f1, f2)))
    for f1, f2, c12 in pairs:
        for g1, g2, c34 in pairs:
            assert compose(tens[f1, g1], tens[f2, g2]) == tens[c12, c34]


def test_symmetry_naturality():
    maps = list(all_morphisms(2))
    for f in maps:
        for g in maps:
            lhs = compose(symmetry(f.dst, g.dst), tensor(f, g))
            rhs = compose(tensor(g, f), symmetry(f.src, g.src))
            assert lhs == rhs


def test_symmetry_self_inverse():
    for m in range(3):
        for n in range(3):
            assert compose(symmetry(n, m), symmetry(m, n)) == identity(m + n)


# -- normal form -------------------------------------------------------------


def test_worked_factorization():
    f = parse_morphism("(x3,1,x1^x5^x2,0):5->4")
    fac = factor(f)
    assert fac.faces == ((4, 0), (2, 1))
    assert fac.conjs == (2, 3)
    assert fac.degens == (4,)
    assert fac.perm.one_line == (2, 4, 1, 3)
    assert str(fac.perm) == "(1 2 4 3)"
    assert fac.evaluate() == f


def test_factor_identity():
    fac = factor(identity(3))
    assert fac.faces == () and fac.conjs == () and fac.degens == ()
    assert fac.perm.is_identity()


def test_factor_round_trip_exhaustive():
    for m in range(4):
        for n in range(4):
            for f in enumerate_hom(m, n, QS):
                assert factor(f).evaluate() == f


def test_factorization_bijection():
    for m in range(4):
        for n in range(4):
            facs = list(enumerate_factorizations(m, n))
            assert len(facs) == hom_count(m, n, QS)
            evaluated = {fac.evaluate() for fac in facs}
            assert evaluated == set(enumerate_hom(m, n, QS))


def test_generator_word_recomposes():
    gens = {
        "sigma": lambda n, i: sigma(i, n),
        "gamma": lambda n, i: gamma(i, n),
        "delta": lambda n, i, eps: delta(i, eps, n),
        "swap": lambda n, t: pi(Permutation.transposition(t, t + 1, n)),
    }
    for f in all_morphisms(3):
        result = identity(f.src)
        for kind, n, *args in factor(f).generator_word():
            result = compose(gens[kind](n, *args), result)
        assert result == f


def test_plus_minus_structure():
    fac = factor(parse_morphism("(x2,0,x1):2->3"))
    assert fac.conjs == () and fac.degens == ()  # in the plus part
    fac = factor(parse_morphism("(x3^x1):3->1"))
    assert fac.faces == ()  # in the minus part


@given(morphisms())
def test_factor_round_trip_random(f):
    assert factor(f).evaluate() == f


# -- permutations ------------------------------------------------------------


def test_cycle_parsing():
    p = Permutation.from_cycles("(1 2 4 3)", 4)
    assert p.one_line == (2, 4, 1, 3)
    assert Permutation.from_cycles("id", 3).is_identity()
    assert Permutation.from_cycles("(1 2)(3 4)", 4).one_line == (2, 1, 4, 3)
    with pytest.raises(MorphismSyntaxError):
        Permutation.from_cycles("(1 5)", 3)


def test_permutation_composition_is_functorial():
    for p_line in itertools.permutations((1, 2, 3)):
        p = Permutation(p_line)
        assert compose(pi(p), pi(p.inverse())) == identity(3)
        for q_line in itertools.permutations((1, 2, 3)):
            q = Permutation(q_line)
            assert compose(pi(p), pi(q)) == pi(p.after(q))


@given(st.permutations(list(range(1, 7))))
def test_adjacent_word_recomposes(line):
    p = Permutation(line)
    acc = Permutation.identity(p.n)
    for b in p.adjacent_word():
        acc = acc.after(Permutation.transposition(b, b + 1, p.n))
    assert acc == p


# -- hom enumeration ---------------------------------------------------------


def test_hom_examples():
    assert len(enumerate_hom(2, 0, QS)) == 1
    assert {str(f) for f in enumerate_hom(0, 2, QS)} == {
        "(0,0):0->2", "(0,1):0->2", "(1,0):0->2", "(1,1):0->2"
    }
    assert {str(f) for f in enumerate_hom(2, 1, QS)} == {
        "(0):2->1", "(1):2->1", "(x1):2->1", "(x2):2->1",
        "(x1^x2):2->1", "(x2^x1):2->1",
    }
    assert {str(f) for f in enumerate_hom(1, 1, Q)} == {
        "(0):1->1", "(1):1->1", "(x1):1->1"
    }


def test_hom_counts_frozen():
    # counts derived by hand from the normal form before implementation
    assert hom_count(2, 1, QS) == 6
    assert hom_count(1, 1, Q) == 3
    assert hom_count(1, 2, QS) == 8
    assert hom_count(2, 2, QS) == 22
    assert hom_count(3, 3, QS) == 302
    # cube levels |QSigma(k, n)|
    assert [hom_count(k, 1, QS) for k in range(2)] == [2, 3]
    assert [hom_count(k, 2, QS) for k in range(3)] == [4, 8, 22]
    assert [hom_count(k, 3, QS) for k in range(4)] == [8, 20, 68, 302]


def test_hom_count_matches_enumeration():
    for m in range(4):
        for n in range(4):
            for tag in (QS, Q):
                assert len(enumerate_hom(m, n, tag)) == hom_count(m, n, tag)


def test_terminal_and_vertices():
    for m in range(5):
        assert hom_count(m, 0, QS) == 1
    for n in range(7):
        assert hom_count(0, n, QS) == 2 ** n


def test_enumeration_is_sorted_and_q_subset():
    for m in range(4):
        for n in range(4):
            homs = enumerate_hom(m, n, QS)
            assert list(homs) == sorted(homs)
            q_homs = set(enumerate_hom(m, n, Q))
            assert q_homs == {f for f in homs if site.is_box_arrow(f)}


def test_resource_bound():
    with pytest.raises(ResourceBound):
        enumerate_hom(3, 3, QS, limit=100)
    assert len(enumerate_hom(2, 1, QS, limit=100)) == 6


# -- classification ----------------------------------------------------------


def test_classify_examples():
    fl = classify(parse_morphism("(x2,x1):2->2"))
    assert fl.is_iso and fl.is_mono and fl.is_epi
    fl = classify(parse_morphism("(x1^x2):2->1"))
    assert fl.is_epi and not fl.is_mono and fl.in_minus
    fl = classify(parse_morphism("(0,x1):1->2"))
    assert fl.is_mono and not fl.is_epi and fl.in_plus and fl.in_Q
    assert not classify(parse_morphism("(x2^x1):2->1")).in_Q
    assert classify(parse_morphism("(x1,x3):3->2")).in_Q


def test_classify_against_categorical_definition():
    """is_mono/is_epi agree with cancellation tested over probes up to dim 3."""
    for m in range(3):
        for n in range(3):
            for f in enumerate_hom(m, n, QS):
                mono_cat = all(
                    compose(f, g1) != compose(f, g2)
                    for t in range(4)
                    for g1, g2 in itertools.combinations(
                        enumerate_hom(t, m, QS), 2
                    )
                )
                epi_cat = all(
                    compose(g1, f) != compose(g2, f)
                    for t in range(4)
                    for g1, g2 in itertools.combinations(
                        enumerate_hom(n, t, QS), 2
                    )
                )
                fl = classify(f)
                assert fl.is_mono == mono_cat, f
                assert fl.is_epi == epi_cat, f


def test_thickening_bijection():
    """Aut([m]) x Q+(m,n) -> QSigma+(m,n), (p, d) |-> d o pi(p)."""
    for m in range(4):
        for n in range(4):
            q_monos = [
                f for f in enumerate_hom(m, n, Q) if classify(f).in_plus
            ]
            sigma_monos = {
                f for f in enumerate_hom(m, n, QS) if classify(f).in_plus
            }
            images = [
                compose(d, pi(Permutation(p)))
                for p in itertools.permutations(range(1, m + 1))
                for d in q_monos
            ]
            assert len(images) == len(set(images))
            assert set(images) == sigma_monos


# -- vertices ----------------------------------------------------------------


def test_vertices_action_examples():
    table = vertices_action(parse_morphism("(x1^x2):2->1"))
    assert table[(1, 1)] == (1,)
    assert table[(1, 0)] == (0,)
    swap = vertices_action(parse_morphism("(x2,x1):2->2"))
    assert swap[(1, 0)] == (0, 1)


def test_vertices_not_faithful_witness_found_by_scan():
    homs = enumerate_hom(2, 1, QS)
    collisions = [
        (f, g)
        for f, g in itertools.combinations(homs, 2)
        if vertices_action(f) == vertices_action(g)
    ]
    assert collisions == [
        (parse_morphism("(x1^x2):2->1"), parse_morphism("(x2^x1):2->1"))
    ]


# -- EZ structure ------------------------------------------------------------


def test_ez_factor_examples():
    epi, mono = ez_factor(parse_morphism("(0,x1^x2):2->2"))
    assert str(epi) == "(x1^x2):2->1"
    assert str(mono) == "(0,x1):1->2"
    assert ez_factor(identity(3)) == (identity(3), identity(3))
    epi, mono = ez_factor(parse_morphism("(x2^x1):2->1"))
    assert str(epi) == "(x2^x1):2->1" and mono == identity(1)


def test_verify_ez_passes():
    report = verify_ez(3)
    assert report.ok, str(report)


def test_sections_of_generators():
    assert sections_of(sigma(2, 2)) == [delta(2, 0, 2), delta(2, 1, 2)]
    assert sections_of(gamma(2, 2)) == [delta(2, 1, 2), delta(3, 1, 2)]
    assert sections_of(parse_morphism("(x2^x1):2->1")) == [
        parse_morphism("(1,x1):1->2"),
        parse_morphism("(x1,1):1->2"),
    ]
    with pytest.raises(NotEpi):
        sections_of(delta(1, 0, 1))


# -- split pushouts ----------------------------------------------------------


def test_split_pushout_equal_pair():
    po = split_pushout(sigma(1, 1), sigma(1, 1))
    assert po.tau1 == identity(1) and po.tau2 == identity(1)
    assert po.witness is not None


def test_split_pushout_sigma_sigma_pinned():
    po = split_pushout(sigma(1, 1), sigma(2, 1))
    assert str(po.tau1) == "():1->0" and str(po.tau2) == "():1->0"
    w = po.witness
    assert w.d0 == delta(1, 0, 0)
    assert w.d1 == delta(2, 0, 1)
    assert w.d2prime == delta(1, 0, 1)


def test_split_pushout_gamma_sigma_pinned():
    po = split_pushout(gamma(1, 1), sigma(1, 1))
    assert str(po.tau1) == "():1->0" and str(po.tau2) == "():1->0"
    w = po.witness
    assert w.d0 == delta(1, 0, 0)
    assert w.d1 == delta(1, 0, 1)
    assert w.d2prime == delta(2, 1, 1)


def test_split_pushout_rejects_non_epi():
    with pytest.raises(NotEpi):
        split_pushout(delta(1, 0, 1), sigma(1, 0))


def test_verify_split_pushouts_all_generator_pairs():
    report = verify_split_pushouts(4)
    assert report.ok, str(report)
    assert len(report.entries) == 1 + 9 + 25 + 49


def test_split_pushout_composite():
    # (x2^x3) merges then forgets x1; against sigma1 the merged class survives
    a1 = parse_morphism("(x2^x3):3->1")
    a2 = sigma(1, 2)
    po = split_pushout(a1, a2)
    assert po.tau1 == identity(1)
    assert po.tau2 == gamma(1, 1)
    assert po.witness is not None
    assert compose(po.tau1, a1) == compose(po.tau2, a2)


def test_split_pushout_order_conflict_collapses():
    # the two conjunction orders are incompatible, so the class dies
    a1 = parse_morphism("(x1^x2):2->1")
    a2 = parse_morphism("(x2^x1):2->1")
    po = split_pushout(a1, a2)
    assert po.apex == 0
    assert compose(po.tau1, a1) == compose(po.tau2, a2)


# -- relations ---------------------------------------------------------------


def test_relation_examples():
    assert compose(sigma(2, 1), delta(2, 0, 1)) == identity(1)
    assert compose(gamma(1, 1), delta(1, 1, 1)) == identity(1)


def test_verify_relations_to_4():
    report = verify_relations(4)
    assert report.ok, str(report)
    # 12 + 40 + 84 + 144 + 220 instances for n = 0..4
    assert len(report.entries) == 500
