import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qshelf import xq
from qshelf.series import Series, product_side
from qshelf.shelves import closed_form_ghost, closed_form_official

N = 24


def test_support_bound_enforced():
    with pytest.raises(ValueError):
        xq.BivariateSeries.monomial(3, 2, 5)
    with pytest.raises(ValueError):
        xq.BivariateSeries.one(5).shift(2, 1)


def test_constant_terms():
    for k in range(2, 5):
        for i in range(1, k + 1):
            assert xq.jtilde(k, i, 10)[0, 0] == 1
        for i in range(1, k):
            assert xq.jtildetilde(k, i, 10)[0, 0] == 1


def test_specialize_at_zero_sums_columns():
    s = xq.jtilde(3, 2, N)
    col = [sum(s[a, b] for a in range(b + 1)) for b in range(N + 1)]
    assert [int(c) for c in xq.specialize(s, 0).coefficients(N)] == col


def test_inverse():
    p = xq.BivariateSeries.one(N)
    for m in range(1, 6):
        p = p.mul_binomial(-1, 1, m)
    assert p * p.inverse() == xq.BivariateSeries.one(N)
    with pytest.raises(ValueError):
        xq.BivariateSeries.monomial(0, 0, N, 2).inverse()


@st.composite
def bivariate(draw):
    terms = draw(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 12), st.integers(-5, 5)), max_size=12))
    s = xq.BivariateSeries.zero(12)
    for a, b, c in terms:
        if a <= b:
            s = s + xq.BivariateSeries.monomial(a, b, 12, c)
    return s


@settings(max_examples=40, deadline=None)
@given(bivariate(), st.sampled_from([1, -1]), st.integers(0, 3), st.integers(1, 5))
def test_binomial_division_inverts_multiplication(s, sign, da, db):
    if db < da:
        return
    assert s.mul_binomial(sign, da, db).div_binomial(sign, da, db) == s


@settings(max_examples=30, deadline=None)
@given(bivariate(), bivariate(), st.integers(0, 4))
def test_specialize_is_a_ring_map(s, t, j):
    assert xq.specialize(s * t, j) == xq.specialize(s, j) * xq.specialize(t, j)
    assert xq.specialize(s + t, j) == xq.specialize(s, j) + xq.specialize(t, j)


@settings(max_examples=30, deadline=None)
@given(bivariate())
def test_support_preserved(s):
    t = (s * s).mul_binomial(1, 1, 2).div_binomial(-1, 1, 1)
    for a, b, _ in t.terms():
        assert a <= b


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_direct_and_substituted_forms_agree(k):
    for i in range(1, k + 1):
        assert xq.jtilde(k, i, N) == xq.jtilde_via_h(k, i, N)


def test_h_form_needs_substitution():
    term = xq.htilde_terms(3, 1, 10)[1]
    with pytest.raises(ValueError):
        term.evaluate(10)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_dictionary_small(k):
    for i in range(1, k + 1):
        f = xq.jtilde(k, k - i + 1, N)
        assert xq.specialize(f, 0) == product_side(k, i, N)
        for j in range(4):
            assert xq.specialize(f, j) == closed_form_official(k, j, i, N)
    for i in range(2, k + 1):
        g = xq.jtildetilde(k, k - i + 1, N)
        for j in range(4):
            assert xq.specialize(g, j) == closed_form_ghost(k, j, i, N)


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_construction_identities(k):
    for i in range(1, k):
        assert xq.construction_lhs(k, i, N) == xq.construction_rhs(k, i, N)


def test_gap_filling():
    for n in range(4):
        for j in range(5):
            a, b, c = xq.gap_filling_sides(n, j, 30)
            assert a == b == c


def test_factorisation():
    for n in range(4):
        for i in range(1, 6):
            left, right = xq.factorization_sides(n, i, (2 * n + 1) * (i + 1) + 1)
            assert left == right


def test_json_sorted_by_b_then_a():
    s = xq.jtilde(3, 1, 8)
    js = s.to_json()
    keys = [(t["b"], t["a"]) for t in js]
    assert keys == sorted(keys)
    assert all(isinstance(t["c"], str) for t in js)
    assert xq.BivariateSeries.from_json(js, 8) == s


def test_first_mismatch_order():
    s = xq.BivariateSeries.zero(6)
    t = s + xq.BivariateSeries.monomial(2, 4, 6) + xq.BivariateSeries.monomial(0, 5, 6)
    assert xq.first_mismatch(s, t) == (2, 4, 0, 1)


def test_specialize_returns_series():
    assert isinstance(xq.specialize(xq.BivariateSeries.one(4), 3), Series)
