import pytest

from qshelf import shelves as S
from qshelf.errors import RecursionFailed
from qshelf.series import Series, product_side


def test_shelf_index():
    idx = S.ShelfIndex(4, 2, 3)
    assert idx.r == 9
    assert S.ShelfIndex.from_r(4, 9) == idx
    assert S.ShelfIndex.from_r(4, 7) == S.ShelfIndex(4, 2, 1)
    with pytest.raises(ValueError):
        S.ShelfIndex(4, 0, 5)


def test_shelf_zero_is_product_side():
    for k in range(2, 6):
        for i in range(1, k + 1):
            assert S.closed_form_official(k, 0, i, 50) == product_side(k, i, 50)


def test_recursion_matches_closed_forms():
    for k in range(2, 5):
        rec = S.build_by_recursion(k, 5, 40)
        ref = S.build_by_closed_form(k, 5, 40)
        assert rec.officials.keys() == ref.officials.keys()
        for r in rec.officials:
            assert rec.officials[r] == ref.officials[r], r
        for r in rec.ghosts:
            assert rec.ghosts[r] == ref.ghosts[r], r


def test_recursion_provenance():
    t = S.build_by_recursion(3, 2, 20)
    assert t.provenance[("official", 1)] == "product-side"
    assert t.provenance[("official", 5)] == "recursion"
    assert t.provenance[("ghost", 2)] == "recursion"


def test_strict_division_reports_certificate():
    bad = Series.from_dict({1: 1, 4: 1}, 10)
    with pytest.raises(RecursionFailed) as info:
        S._strict(bad, 3, {"k": 3, "j": 1, "i": 2})
    cert = info.value.certificate
    assert cert["exponent"] == 1 and cert["divisor_power"] == 3 and cert["indices"]["i"] == 2


def test_recursion_rejects_corrupted_start(monkeypatch):
    real = S.product_side

    def broken(k, i, order):
        s = real(k, i, order)
        return s.perturbed(2, 1) if i == 1 else s
    monkeypatch.setattr(S, "product_side", broken)
    with pytest.raises(RecursionFailed):
        S.build_by_recursion(3, 2, 20)


def test_edge_matching():
    for k in range(2, 6):
        for j in range(1, 6):
            assert S.edge_match_check(k, j, 40)


def test_ghost_decomposition():
    for k in range(2, 6):
        for J in range(4):
            for i in range(2, k + 1):
                assert S.ghost_decomposition_check(k, J, i, 40)


def test_first_ghost_extension():
    t = S.build_by_closed_form(4, 1, 30)
    assert S.ghost_extension_b1(t) == t.officials[2]


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_standard_eh(k):
    t = S.build_by_closed_form(k, 6, 20)
    for j in range(7):
        for i in range(1, k + 1):
            assert S.eh_check(t, j, i).passed
        for i in range(2, k + 1):
            assert S.eh_check(t, j, i, ghost=True).passed


def test_k2_edge_ghost_skips_q_j_plus_2():
    # for k = 2 the ghost with i = k equals the official two shelves up,
    # which starts 1 + q^(j+3): the strong form fails, the standard one holds
    t = S.build_by_closed_form(2, 8, 24)
    for j in range(9):
        rep = S.eh_check(t, j, 2, "strong", ghost=True)
        assert rep.f == j + 3 and not rep.passed
        assert S.eh_check(t, j, 2, "standard", ghost=True).passed


def test_eh_report_csv():
    t = S.build_by_closed_form(3, 1, 10)
    rep = S.eh_check(t, 1, 2, "weak")
    assert rep.csv_row() == [3, 1, 2, "official", "weak", rep.f, 1]
    assert S.EH_CSV_HEADER == ["k", "j", "i", "kind", "strength", "f", "pass"]


def test_table_json_schema():
    t = S.build_by_closed_form(3, 1, 8)
    js = t.to_json()
    assert js["k"] == 3 and js["order"] == 8
    assert set(js["officials"]) == {str(r) for r in range(1, 6)}
    assert set(js["ghosts"]) == {"2", "3", "4", "5"}
    assert Series.from_json(js["officials"]["4"]) == t.officials[4]


def test_coefficients_nonnegative():
    for k in range(2, 7):
        t = S.build_by_closed_form(k, 6, 40)
        for s in list(t.officials.values()) + list(t.ghosts.values()):
            assert min(int(c) for c in s.coeffs) >= 0


def test_recursion_k6():
    rec = S.build_by_recursion(6, 8, 60)
    for j in range(9):
        for i in range(1, 7):
            assert rec.official(j, i) == S.closed_form_official(6, j, i, 60)
        for i in range(2, 7):
            assert rec.ghost(j, i) == S.closed_form_ghost(6, j, i, 60)
