import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chisquare

from nbldpc.field import Matrix, ShapeError, mat_rref, random_gl
from nbldpc.subspace import (
    affine,
    affine_contains,
    affine_intersect,
    affine_map,
    affine_neg,
    affine_sum,
    apply_map,
    contains,
    from_generators,
    full_space,
    intersect,
    linear,
    point,
    random_element,
    uniform_random_subspace,
    zero_space,
)

E = np.eye(3, dtype=int)
e1, e2, e3 = E


def span(*vs, m=3, q=2, packed=None):
    return from_generators([list(v) for v in vs], m, q, packed=packed)


def as_set(s):
    return {tuple(int(c) for c in x) for x in s.elements()}


def brute_span(vectors, m, q):
    out = {tuple([0] * m)}
    for coeffs in itertools.product(range(q), repeat=len(vectors)):
        v = sum((c * np.asarray(x) for c, x in zip(coeffs, vectors)), np.zeros(m, dtype=int)) % q
        out.add(tuple(int(c) for c in v))
    return out


# -- construction and canonical form

def test_from_generators_examples():
    assert from_generators([], 3).dim == 0
    s = span(e1, e1 + e2, e2)
    assert s.dim == 2 and s.basis.tolist() == [[1, 0, 0], [0, 1, 0]]
    assert from_generators([[1, 2]], 2, 3).basis.tolist() == [[1, 2]]
    assert from_generators([[2, 1]], 2, 3).basis.tolist() == [[1, 2]]
    with pytest.raises(ShapeError):
        from_generators([[1, 0]], 3)


@pytest.mark.parametrize("packed", [True, False])
def test_canonical_form_is_rref(packed):
    rng = np.random.default_rng(1)
    for _ in range(50):
        gens = rng.integers(0, 2, size=(4, 7))
        s = from_generators(gens, 7, 2, packed=packed)
        r, rk, _ = mat_rref(Matrix(gens, 2))
        assert s.basis.tolist() == r.data[:rk].tolist()


def test_equality_across_engines():
    a = span(e1 + e2, e3, packed=True)
    b = span(e3, e1 + e2, packed=False)
    assert a == b and hash(a) == hash(b)
    assert a != span(e1, e3, packed=False)


# -- sum / intersection / membership

def test_sum_examples():
    assert (span(e1, e2) + span(e2, e3)).dim == 3
    v = span(e1 + e3)
    assert v + zero_space(3) == v
    assert v + v == v


def test_intersection_examples():
    assert intersect(span(e1, e2), span(e2, e3)) == span(e2)
    v = span(e1 + e2)
    assert v & full_space(3) == v
    # both sides have 4 elements, only 0 and 111 are shared
    a, b = span([1, 1, 0], [0, 0, 1]), span([1, 1, 1])
    assert as_set(a) & as_set(b) == {(0, 0, 0), (1, 1, 1)}
    assert intersect(a, b) == span([1, 1, 1])


def test_contains_examples():
    v = span(e1 + e2)
    assert contains(v, [0, 0, 0])
    assert not contains(zero_space(3), e1)
    assert contains(from_generators([[1, 1]], 2), [1, 1])
    assert [1, 1, 0] in v and [1, 0, 0] not in v


@pytest.mark.parametrize("q,m", [(2, 4), (2, 5), (3, 3), (5, 2)])
def test_operations_match_enumeration(q, m):
    rng = np.random.default_rng(q * 10 + m)
    for _ in range(25):
        g1 = rng.integers(0, q, size=(int(rng.integers(0, m + 1)), m))
        g2 = rng.integers(0, q, size=(int(rng.integers(0, m + 1)), m))
        s1, s2 = from_generators(g1, m, q), from_generators(g2, m, q)
        e1_, e2_ = brute_span(list(g1), m, q), brute_span(list(g2), m, q)
        assert as_set(s1) == e1_
        assert as_set(s1 & s2) == e1_ & e2_
        assert as_set(s1 + s2) == brute_span(list(g1) + list(g2), m, q)


# -- the two engines agree

@pytest.mark.parametrize("m", [1, 5, 13, 40, 70])
def test_packed_and_dense_engines_agree(m):
    rng = np.random.default_rng(m)
    for _ in range(40):
        d1, d2 = rng.integers(0, m + 1, size=2)
        g1 = rng.integers(0, 2, size=(int(d1), m))
        g2 = rng.integers(0, 2, size=(int(d2), m))
        p1, p2 = from_generators(g1, m, packed=True), from_generators(g2, m, packed=True)
        n1, n2 = from_generators(g1, m, packed=False), from_generators(g2, m, packed=False)
        assert p1 == n1 and (p1 + p2) == (n1 + n2) and (p1 & p2) == (n1 & n2)
        h = random_gl(m, 2, rng)
        assert apply_map(h, p1) == apply_map(h, n1)
        x = rng.integers(0, 2, size=m)
        y = rng.integers(0, 2, size=m)
        ap = affine_intersect(affine(x, p1), affine(y, p2))
        an = affine_intersect(affine(x, n1), affine(y, n2))
        assert (ap is None) == (an is None)
        if ap is not None:
            assert ap == an
        assert affine_sum(affine(x, p1), affine(y, p2)) == affine_sum(affine(x, n1), affine(y, n2))


def test_mixed_engines_rejected():
    with pytest.raises(ShapeError):
        span(e1, packed=True) + span(e2, packed=False)
    with pytest.raises(ShapeError):
        span(e1) + from_generators([[1, 0]], 2)


# -- random subspaces

def test_uniform_random_subspace_extremes():
    rng = np.random.default_rng(0)
    assert uniform_random_subspace(5, 0, 3, rng).is_zero()
    assert uniform_random_subspace(5, 5, 3, rng).is_full()
    with pytest.raises(ValueError):
        uniform_random_subspace(3, 4, 2, rng)


def test_uniform_random_subspace_grassmannian():
    # 2-dimensional subspaces of F_2^4: (15 * 14) / (3 * 2) = 35
    vectors = [v for v in itertools.product(range(2), repeat=4) if any(v)]
    planes = {span(a, b, m=4).key() for a, b in itertools.combinations(vectors, 2)}
    assert len(planes) == 35
    rng = np.random.default_rng(35)
    counts = dict.fromkeys(planes, 0)
    for _ in range(35_000):
        s = uniform_random_subspace(4, 2, 2, rng)
        assert s.dim == 2
        counts[s.key()] += 1
    assert chisquare(list(counts.values())).pvalue > 1e-3


def test_random_element_stays_inside():
    rng = np.random.default_rng(3)
    v = uniform_random_subspace(6, 3, 3, rng)
    for _ in range(50):
        assert contains(v, random_element(v, rng))


# -- maps

def test_apply_map_examples():
    v = span(e1)
    assert apply_map(Matrix.identity(3, 2), v) == v
    swap = Matrix([[0, 1, 0], [1, 0, 0], [0, 0, 1]], 2)
    assert apply_map(swap, v) == span(e2)
    rng = np.random.default_rng(4)
    for _ in range(20):
        w = uniform_random_subspace(6, int(rng.integers(0, 7)), 3, rng)
        assert apply_map(random_gl(6, 3, rng), w).dim == w.dim


def test_apply_map_matches_elementwise_image():
    rng = np.random.default_rng(5)
    w = uniform_random_subspace(4, 2, 3, rng)
    h = random_gl(4, 3, rng)
    image = {tuple(int(c) for c in (h.data @ x) % 3) for x in w.elements()}
    assert as_set(apply_map(h, w)) == image


# -- affine subspaces

def test_affine_canonical_offset():
    d = span(e1)
    a, b = affine([1, 1, 0], d), affine([0, 1, 0], d)
    assert a == b and a.offset.tolist() == [0, 1, 0]
    assert affine_contains(a, [1, 1, 0]) and not affine_contains(a, [0, 0, 1])
    assert linear(d).is_linear() and not a.is_linear()


def test_affine_sum_examples():
    y1, y2 = np.array([1, 0, 1]), np.array([1, 1, 0])
    a = affine(y1, span(e2))
    assert affine_sum(a, point([0, 0, 0])) == a
    assert affine_sum(point(y1), point(y2)) == point((y1 + y2) % 2)
    plane = affine_sum(affine([1, 0], from_generators([[1, 0]], 2)), affine([0, 1], from_generators([[0, 1]], 2)))
    assert plane.dim == 2 and plane.is_linear()


def test_affine_intersect_examples():
    a = affine([1, 0, 1], span(e2, e3))
    assert affine_intersect(a, a) == a
    x1 = from_generators([[1, 0]], 2)
    assert affine_intersect(affine([0, 0], x1), affine([0, 1], x1)) is None
    assert affine_intersect(linear(span(e1, e2)), linear(span(e2, e3))) == linear(span(e2))


@pytest.mark.parametrize("q,m", [(2, 4), (3, 3)])
def test_affine_intersect_matches_enumeration(q, m):
    rng = np.random.default_rng(q + m)
    for _ in range(60):
        a = affine(rng.integers(0, q, size=m), uniform_random_subspace(m, int(rng.integers(0, m + 1)), q, rng))
        b = affine(rng.integers(0, q, size=m), uniform_random_subspace(m, int(rng.integers(0, m + 1)), q, rng))
        truth = as_set(a) & as_set(b)
        got = affine_intersect(a, b)
        assert (as_set(got) if got is not None else set()) == truth


def test_affine_neg_and_map():
    a = affine([1, 2, 0], from_generators([[0, 0, 1]], 3, 3))
    assert as_set(affine_neg(a)) == {tuple((-np.array(x)) % 3) for x in as_set(a)}
    assert affine_map(Matrix.identity(3, 3), a) == a
    rng = np.random.default_rng(9)
    h = random_gl(3, 3, rng)
    assert affine_map(h, point([1, 2, 0], 3)) == point((h.data @ [1, 2, 0]) % 3, 3)
    assert as_set(affine_map(h, a)) == {tuple((h.data @ np.array(x)) % 3) for x in as_set(a)}
    assert affine_map(h, a).dim == a.dim


# -- properties

subspace_args = st.tuples(
    st.sampled_from([2, 3, 5]),
    st.integers(1, 10),
    st.integers(0, 2**32 - 1),
)


@settings(max_examples=80, deadline=None)
@given(subspace_args)
def test_dimension_law_and_lattice_properties(args):
    q, m, seed = args
    rng = np.random.default_rng(seed)
    v1 = uniform_random_subspace(m, int(rng.integers(0, m + 1)), q, rng)
    v2 = uniform_random_subspace(m, int(rng.integers(0, m + 1)), q, rng)
    s, i = v1 + v2, v1 & v2
    assert s.dim + i.dim == v1.dim + v2.dim
    assert v1 + v2 == v2 + v1 and v1 & v2 == v2 & v1
    assert (v1 + s) == s and (v1 & i) == i
    for x in (random_element(i, rng),):
        assert x in v1 and x in v2


@settings(max_examples=60, deadline=None)
@given(subspace_args)
def test_affine_intersection_is_sound(args):
    q, m, seed = args
    rng = np.random.default_rng(seed)
    d1 = uniform_random_subspace(m, int(rng.integers(0, m + 1)), q, rng)
    d2 = uniform_random_subspace(m, int(rng.integers(0, m + 1)), q, rng)
    common = rng.integers(0, q, size=m)
    a = affine((common + random_element(d1, rng)) % q, d1)
    b = affine((common + random_element(d2, rng)) % q, d2)
    c = affine_intersect(a, b)
    assert c is not None and common in c
    assert c.direction == d1 & d2
