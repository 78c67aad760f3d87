import itertools
from math import comb

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from phaseweb.algebra import (
    SCALAR,
    AlgebraError,
    Blade,
    Multivector,
    apply_action,
    basis,
    blade_product,
    boundary,
    boundary_identity_check,
    boundary_operator,
    coboundary,
    coboundary_operator,
    nullspace,
    rank,
    reverse,
    verify_identities,
    verify_ladder,
)


def oracle_product(a, b, metric=1):
    """Reduce the concatenated word by adjacent swaps; equal neighbours contract."""
    word = list(a) + list(b)
    sign = 1
    changed = True
    while changed:
        changed = False
        for i in range(len(word) - 1):
            if word[i] > word[i + 1]:
                word[i], word[i + 1] = word[i + 1], word[i]
                sign = -sign
                changed = True
                break
            if word[i] == word[i + 1]:
                del word[i : i + 2]
                sign *= metric
                changed = True
                break
    return sign, tuple(word)


def vec(n, *coeffs):
    return Multivector(n, {Blade.of(i + 1): c for i, c in enumerate(coeffs)})


def blade(n, *idx, c=1):
    return Multivector.from_blade(n, Blade.of(*idx), c)


blades = st.integers(1, 6).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.integers(1, n), unique=True).map(lambda l: tuple(sorted(l))))
)


# concrete identities


def test_pair_flip_identity():
    # (s1 + s2) s1s2 = -s1 + s2
    assert vec(2, 1, 1) * blade(2, 1, 2) == vec(2, -1, 1)


def test_bivector_squares_to_minus_one():
    assert blade(2, 1, 2) * blade(2, 1, 2) == Multivector.scalar(2, -1)


def test_half_turn_negates_both_sensors():
    assert apply_action(Blade.of(1, 2), vec(2, 1, 1)) == vec(2, -1, -1)


def test_half_turn_fixes_vectors_outside_the_plane():
    assert apply_action(Blade.of(1, 2), vec(3, 0, 0, 1)) == vec(3, 0, 0, 1)


def test_odd_grade_sandwich_does_not_negate():
    # s1s2s3 s1 ~(s1s2s3) = s1, so the half-turn reading is specific to even grade
    assert apply_action(Blade.of(1, 2, 3), vec(3, 1)) == vec(3, 1)


def test_action_needs_grade_two():
    with pytest.raises(AlgebraError):
        apply_action(Blade.of(1), vec(2, 1, 1))


def test_reverse_signs():
    assert [reverse(blade(4, *range(1, k + 1))) == blade(4, *range(1, k + 1), c=s)
            for k, s in [(1, 1), (2, -1), (3, -1), (4, 1)]] == [True] * 4


def test_blade_validation():
    with pytest.raises(AlgebraError):
        Blade((2, 1))
    with pytest.raises(AlgebraError):
        Blade((0,))
    with pytest.raises(AlgebraError):
        Multivector(2, {Blade.of(3): 1})


def test_str_forms():
    assert str(vec(2, -1, 1)) == "-s1 + s2"
    assert str(Blade.of(1, 2)) == "s1s2"
    assert str(SCALAR) == "1"


def test_triangle_boundary():
    # three edges of a triangle; the closed cycle has zero boundary
    assert boundary(blade(3, 1, 2, 3)) == blade(3, 2, 3) - blade(3, 1, 3) + blade(3, 1, 2)
    cycle = blade(3, 2, 3) - blade(3, 1, 3) + blade(3, 1, 2)
    assert boundary(cycle).is_zero()


def test_boundary_of_vector_is_augmentation():
    assert boundary(vec(3, 1)) == Multivector.scalar(3)
    assert boundary(Multivector.scalar(3)).is_zero()


def test_boundary_identity_pair():
    b = Blade.of(1, 2)
    assert boundary(blade(2, 1, 2)) == vec(2, 1, 1) * blade(2, 1, 2)
    assert boundary_identity_check(b)


def test_boundary_identity_fails_for_negative_metric():
    assert not boundary_identity_check(Blade.of(1, 2), 2, metric=-1)


def test_coboundary_examples():
    assert coboundary(Multivector.scalar(3)) == vec(3, 1, 1, 1)
    assert coboundary(vec(3, 1)) == -blade(3, 1, 2) - blade(3, 1, 3)


@pytest.mark.parametrize("n", range(1, 7))
def test_coboundary_is_boundary_transpose(n):
    for k in range(1, n + 1):
        d = boundary_operator(n, k).matrix
        c = coboundary_operator(n, k - 1).matrix
        assert tuple(zip(*d)) == c


def test_ranks_n3():
    assert verify_ladder(3).boundary_ranks == [1, 2, 1]


@pytest.mark.parametrize("n", range(1, 7))
def test_ladder_ok(n):
    rep = verify_ladder(n)
    assert rep.ok
    assert rep.dims == [comb(n, k) for k in range(n + 1)]
    assert rep.boundary_ranks == [comb(n - 1, k - 1) for k in range(1, n + 1)]


@pytest.mark.parametrize("n", [0, 9])
def test_ladder_range(n):
    with pytest.raises(AlgebraError):
        verify_ladder(n)


@pytest.mark.parametrize("n", range(2, 7))
def test_identity_suite(n):
    assert all(verify_identities(n).values())


@pytest.mark.parametrize("n", range(1, 6))
def test_ranks_agree_with_sympy(n):
    for k in range(1, n + 1):
        m = boundary_operator(n, k).matrix
        assert rank(m) == sympy.Matrix(m).rank()
        assert len(nullspace(m)) == comb(n, k) - sympy.Matrix(m).rank()


def test_nullspace_vectors_are_in_kernel():
    m = boundary_operator(4, 2).matrix
    for v in nullspace(m):
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in m)


def test_basis_is_lexicographic():
    assert basis(3, 2) == [Blade.of(1, 2), Blade.of(1, 3), Blade.of(2, 3)]


# properties


@given(blades, st.data(), st.sampled_from([1, -1]))
def test_product_matches_oracle(nb, data, metric):
    n, a = nb
    b = data.draw(st.lists(st.integers(1, n), unique=True).map(lambda l: tuple(sorted(l))))
    sign, c = blade_product(Blade(a), Blade(b), n, metric)
    assert (sign, c.indices) == oracle_product(a, b, metric)


@given(st.integers(2, 6), st.data())
def test_product_is_associative(n, data):
    terms = st.dictionaries(st.lists(st.integers(1, n), unique=True).map(lambda l: Blade(tuple(sorted(l)))),
                            st.integers(-3, 3), max_size=4)
    x, y, z = (Multivector(n, data.draw(terms)) for _ in range(3))
    assert (x * y) * z == x * (y * z)


@given(blades)
def test_boundary_identity_every_blade(nb):
    n, idx = nb
    if idx:
        assert boundary_identity_check(Blade(idx), n)


@given(blades)
def test_boundary_and_coboundary_square_to_zero(nb):
    n, idx = nb
    x = Multivector.from_blade(n, Blade(idx))
    assert boundary(boundary(x)).is_zero()
    assert coboundary(coboundary(x)).is_zero()


@given(st.integers(2, 6), st.data())
def test_even_sandwich_negates_in_support(n, data):
    k = data.draw(st.sampled_from([g for g in range(2, n + 1) if g % 2 == 0]))
    support = data.draw(st.lists(st.integers(1, n), min_size=k, max_size=k, unique=True))
    b = Blade(tuple(sorted(support)))
    for i in range(1, n + 1):
        out = apply_action(b, Multivector.vector(n, i))
        assert out == Multivector.vector(n, i, -1 if i in support else 1)


@settings(max_examples=50)
@given(st.integers(2, 6), st.data())
def test_pair_flip_all_pairs(n, data):
    i, j = sorted(data.draw(st.lists(st.integers(1, n), min_size=2, max_size=2, unique=True)))
    si, sj = Multivector.vector(n, i), Multivector.vector(n, j)
    bij = Multivector.from_blade(n, Blade.of(i, j))
    assert (si + sj) * bij == -si + sj
    assert bij * bij == Multivector.scalar(n, -1)


def test_exhaustive_pairs_small():
    for n in range(2, 5):
        for i, j in itertools.combinations(range(1, n + 1), 2):
            assert apply_action(Blade.of(i, j), Multivector.vector(n, i) + Multivector.vector(n, j)) == (
                -Multivector.vector(n, i) - Multivector.vector(n, j)
            )
