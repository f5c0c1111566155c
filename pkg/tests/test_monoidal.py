"""Day convolution, pushout-products, and the symmetrization adjunction."""

import pytest

from symcube.errors import InputError, ResourceBound, TruncationMismatch
from symcube.monoidal import (
    adjunction_counit,
    adjunction_unit,
    associator_comparison,
    braiding_comparison,
    convolve,
    convolve_map,
    monoidality_comparison,
    pairing_map,
    pushout_product,
    restrict,
    symmetrize,
    symmetrize_comparison,
    symmetrize_map,
    symmetrize_structure,
    unit_comparison,
    verify_convolution,
    verify_triangle_identities,
)
from symcube.presheaf import (
    PresheafMap,
    SectionRef,
    SubgroupSpec,
    boundary,
    cap,
    coproduct,
    empty_presheaf,
    find_isomorphism,
    identity_map,
    quotient_presheaf,
    representable,
    skeleton,
    terminal_presheaf,
)
from symcube.site import SiteTag, delta, hom_count, parse_morphism, sigma

QS = SiteTag.QSIGMA
Q = SiteTag.Q

R0 = representable(0, QS)
R1 = representable(1, QS)
R2 = representable(2, QS)
BD1, BD1_INCL = boundary(1, QS)
CR11 = convolve(R1, R1)


# -- convolution -------------------------------------------------------------


def test_truncation_adds():
    assert CR11.product.N == 2
    assert convolve(R2, BD1).product.N == 3


def test_square_from_intervals():
    # the motivating identity: the interval squared is the square
    comparison = pairing_map(CR11, R2)
    assert comparison.verify_natural()
    assert comparison.is_bijective()


@pytest.mark.parametrize(
    "m,n",
    [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (0, 2),
     (2, 1), (1, 2), (3, 0), (0, 3)],
)
def test_representable_convolutions(m, n):
    CR = convolve(representable(m, QS), representable(n, QS))
    comparison = pairing_map(CR, representable(m + n, QS))
    assert comparison.verify_natural()
    assert comparison.is_bijective()


@pytest.mark.parametrize("X", [R1, R2, BD1], ids=["cube1", "cube2", "bd1"])
def test_unit_law(X):
    comparison = unit_comparison(convolve(X, R0))
    assert comparison.verify_natural()
    assert comparison.is_bijective()


def test_two_endpoint_product_is_four_points():
    # independent oracle: the coproduct of four points, padded to level 2
    CR = convolve(BD1, BD1)
    assert [len(CR.product.levels[n]) for n in range(3)] == [4, 4, 4]
    four, _ = coproduct([terminal_presheaf(QS, 2)] * 4)
    assert find_isomorphism(CR.product, four) is not None


def test_pair_lookup():
    f = delta(1, 0, 1)  # (0,x1): [1] -> [2]
    ref = CR11.pair(f, SectionRef(1, "(x1):1->1"), SectionRef(1, "(x1):1->1"))
    assert ref.level == 1
    assert ref.id in CR11.product.levels[1]


@pytest.mark.parametrize(
    "X,Y", [(R1, R2), (BD1, R1)], ids=["cube1-cube2", "bd1-cube1"]
)
def test_braiding(X, Y):
    braid = braiding_comparison(convolve(X, Y), convolve(Y, X))
    assert braid.verify_natural()
    assert braid.is_bijective()


@pytest.mark.parametrize(
    "X,Y,Z",
    [(R1, R1, R1), (BD1, R1, BD1)],
    ids=["cubes", "with-boundaries"],
)
def test_associativity(X, Y, Z):
    assert associator_comparison(X, Y, Z).ok


@pytest.mark.parametrize(
    "CR", [CR11, convolve(BD1, R1)], ids=["cube1x2", "bd1-cube1"]
)
def test_collapse_well_defined(CR):
    assert verify_convolution(CR).ok


def test_convolution_site_mismatch():
    with pytest.raises(InputError):
        convolve(R1, representable(1, Q))


# -- pushout-product ---------------------------------------------------------


def test_corner_of_boundary_inclusions():
    corner = pushout_product(BD1_INCL, BD1_INCL)
    bd2 = boundary(2, QS, up_to=2)[0]
    assert [len(corner.src.levels[n]) for n in range(3)] == [
        len(bd2.levels[n]) for n in range(3)
    ]
    assert corner.is_injective()
    assert corner.verify_natural()
    # transported along the canonical comparison, the corner is the
    # boundary inclusion of the square
    comparison = pairing_map(CR11, R2)
    for n in range(3):
        image = {
            comparison.mapping[n][corner.mapping[n][p]]
            for p in corner.src.levels[n]
        }
        assert image == set(bd2.levels[n])


def test_corner_orbit_form_with_trivial_groups():
    # trivial coordinate groups give identity quotients, so the orbit
    # form of the corner comparison reduces to the plain one
    quot, proj = quotient_presheaf(R2, SubgroupSpec.trivial(2))
    assert quot.levels == R2.levels
    assert proj.is_bijective()


def test_corner_unit():
    grow = PresheafMap(empty_presheaf(QS, 0), R0, {0: {}})
    corner = pushout_product(BD1_INCL, grow)
    assert corner.verify_natural()
    assert corner.is_injective()
    collapse = unit_comparison(convolve(R1, R0))
    for n in range(2):
        image = {
            collapse.mapping[n][corner.mapping[n][p]]
            for p in corner.src.levels[n]
        }
        assert image == set(BD1.levels[n])


# -- symmetrization ----------------------------------------------------------


@pytest.mark.parametrize("n", range(4))
def test_symmetrize_representable(n):
    S = symmetrize_structure(representable(n, Q))
    comparison = symmetrize_comparison(S, representable(n, QS))
    assert comparison.verify_natural()
    assert comparison.is_bijective()


@pytest.mark.parametrize("n", range(1, 4))
def test_symmetrize_boundary(n):
    S = symmetrize_structure(boundary(n, Q)[0])
    comparison = symmetrize_comparison(S, boundary(n, QS)[0])
    assert comparison.verify_natural()
    assert comparison.is_bijective()


def test_symmetrize_cap_regression():
    S = symmetrize_structure(cap(2, 1, 0, Q)[0])
    assert [len(S.presheaf.levels[n]) for n in range(3)] == [4, 7, 16]
    comparison = symmetrize_comparison(S, R2)
    assert comparison.verify_natural()
    assert comparison.is_injective()
    # the six symmetric squares that need the missing face
    image = set(comparison.mapping[2].values())
    assert set(R2.levels[2]) - image == {
        "(x1,x2):2->2", "(x2,x1):2->2",
        "(0,x1):2->2", "(0,x2):2->2",
        "(0,x1^x2):2->2", "(0,x2^x1):2->2",
    }


@pytest.mark.parametrize("k", [0, 1])
def test_symmetrize_commutes_with_skeleton(k):
    for X in [representable(2, Q), cap(2, 1, 0, Q)[0]]:
        sub, incl = skeleton(X, k)
        lifted = symmetrize_map(incl)
        target = skeleton(symmetrize(X), k)[0]
        assert lifted.is_injective()
        for n in range(X.N + 1):
            assert (
                sorted(lifted.mapping[n].values())
                == sorted(target.levels[n])
            )


def test_symmetrize_site_guard():
    with pytest.raises(InputError):
        symmetrize(R1)


def test_strong_monoidality():
    for X, Y in [
        (representable(1, Q), representable(1, Q)),
        (boundary(1, Q)[0], boundary(1, Q)[0]),
    ]:
        witness = monoidality_comparison(X, Y)
        assert witness.verify_natural()
        assert witness.is_bijective()


# -- restriction -------------------------------------------------------------


def test_restrict_interval():
    R = restrict(R1, 2)
    assert R.truncated
    assert [len(R.levels[n]) for n in range(3)] == [
        hom_count(k, 1, QS) for k in range(3)
    ]
    with pytest.raises(TruncationMismatch):
        R.extend_to(3)


def test_restrict_terminal():
    R = restrict(representable(0, QS), 3)
    assert all(len(R.levels[n]) == 1 for n in range(4))


def test_restricted_conjunction_is_nondegenerate():
    R = restrict(R1, 2)
    # the level-2 section picked out by the conjunction arrow
    conj = R1.extend_to(2).act(
        parse_morphism("(x1^x2):2->1"), "(x1):1->1"
    )
    assert conj in R.levels[2]
    # no plain degeneracy hits it
    for i in (1, 2):
        table = R.table(sigma(i, 1))
        assert conj not in table.values()
    assert R.is_nondegenerate(SectionRef(2, conj))


def test_restrict_guards():
    with pytest.raises(InputError):
        restrict(representable(1, Q), 2)
    with pytest.raises(ResourceBound):
        restrict(R1, 4, limit=10)


# -- the adjunction ----------------------------------------------------------


@pytest.mark.parametrize(
    "X",
    [representable(1, Q), representable(2, Q),
     cap(2, 1, 0, Q)[0], boundary(2, Q)[0]],
    ids=["cube1", "cube2", "cap", "bd2"],
)
def test_unit_injective(X):
    eta = adjunction_unit(X, X.N + 1)
    assert eta.verify_natural()
    assert eta.is_injective()


@pytest.mark.parametrize("n", [1, 2])
def test_unit_is_the_arrow_inclusion(n):
    # on a representable the unit composed with the evaluation
    # comparison returns each arrow unchanged
    X = representable(n, Q)
    S = symmetrize_structure(X)
    comparison = symmetrize_comparison(S, representable(n, QS))
    eta = adjunction_unit(X, n)
    for m in range(n + 1):
        for x in X.levels[m]:
            assert comparison.mapping[m][eta.mapping[m][x]] == x


@pytest.mark.parametrize("n", [0, 1, 2])
def test_counit_surjective(n):
    Y = representable(n, QS)
    eps = adjunction_counit(Y, n)
    assert eps.verify_natural()
    for m in range(n + 1):
        assert set(eps.mapping[m].values()) == set(Y.levels[m])


def test_counit_surjective_past_stored_levels():
    eps = adjunction_counit(R1, 3)
    assert eps.verify_natural()
    for m in range(4):
        assert set(eps.mapping[m].values()) == set(eps.dst.levels[m])


@pytest.mark.parametrize(
    "Y,bound", [(R1, 3), (R2, 2), (boundary(2, QS)[0], 2)],
    ids=["cube1", "cube2", "bd2"],
)
def test_triangle_identities(Y, bound):
    assert verify_triangle_identities(Y, bound).ok


def test_unit_naturality():
    A, incl = boundary(2, Q)
    B = representable(2, Q)
    eta_a = adjunction_unit(A, 2)
    eta_b = adjunction_unit(B, 2)
    lifted = symmetrize_map(incl)
    for n in range(3):
        for x in A.levels[n]:
            assert (
                lifted.mapping[n][eta_a.mapping[n][x]]
                == eta_b.mapping[n][incl.mapping[n][x]]
            )


def test_counit_naturality():
    A, incl = boundary(2, QS)
    B = R2
    eps_a = adjunction_counit(A, 2)
    eps_b = adjunction_counit(B, 2)
    restricted = PresheafMap(
        restrict(A, 2), restrict(B, 2),
        {n: dict(incl.mapping[n]) for n in range(3)},
    )
    lifted = symmetrize_map(restricted)
    for n in range(3):
        for c in eps_a.src.levels[n]:
            assert (
                incl.mapping[n][eps_a.mapping[n][c]]
                == eps_b.mapping[n][lifted.mapping[n][c]]
            )


def test_adjunction_site_guards():
    with pytest.raises(InputError):
        adjunction_unit(R1, 2)
    with pytest.raises(InputError):
        adjunction_counit(representable(1, Q), 2)


def test_convolve_map_functorial():
    # (x) of identities is the identity
    u = convolve_map(identity_map(R1), identity_map(R1), CR11, CR11)
    assert all(
        u.mapping[n][c] == c
        for n in range(3)
        for c in CR11.product.levels[n]
    )
