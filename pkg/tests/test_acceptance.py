"""Acceptance gate.

Every criterion is an exact coefficient comparison.  Each test is tagged with
its criterion number; the terminal summary prints one PASS/FAIL line per
criterion (see conftest.py).
"""
import json
import subprocess
import sys

import pytest

from qshelf import shelves, verify as V


def check(suite, **cfg):
    rep = V.run(suite, V.Config(**cfg))
    assert rep.passed, json.dumps(rep.first_failure)
    return rep


@pytest.mark.criterion(1)
def test_andrews_bressoud_identities():
    check("andrews-bressoud", ks=(2, 3, 4, 5, 6), n_max=30)


@pytest.mark.criterion(2)
def test_shelf_j_generalisation():
    check("shelf-j", ks=(2, 3, 4), J_max=2, n_max=25)


@pytest.mark.criterion(3)
def test_ghost_interpretation():
    rep = check("ghosts", ks=(2, 3, 4), J_max=2, n_max=25)
    assert sum(o.indices.get("r") == 1 for o in rep.outcomes) == 3


@pytest.mark.criterion(4)
def test_recursion_equals_closed_forms():
    check("recursion", ks=(2, 3, 4, 5), j_max=8, order=60)


@pytest.mark.criterion(5)
def test_edge_matching():
    check("edge-match", ks=(2, 3, 4, 5, 6), j_max=8, order=60)


@pytest.mark.criterion(6)
@pytest.mark.parametrize("strength", ["standard", "strong"])
@pytest.mark.parametrize("kind", ["official", "ghost"])
@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_empirical_hypothesis(k, kind, strength):
    failures = []
    for j in range(13):
        N = V.eh_order(j)
        table = shelves.build_by_closed_form(k, j, N)
        for i in range(1 if kind == "official" else 2, k + 1):
            rep = shelves.eh_check(table, j, i, strength, ghost=kind == "ghost")
            if not rep.passed:
                failures.append(V.eh_certificate(rep))
    assert not failures, json.dumps(failures[0])


@pytest.mark.criterion(7)
def test_matrix_formulation():
    check("matrix", ks=(3, 4, 5), j_max=6, order=40)


@pytest.mark.criterion(8)
def test_h_limit_is_official_series():
    check("h-limit", ks=(2, 3, 4, 5), J_max=3, order=40)


@pytest.mark.criterion(9)
def test_h_polynomials_count_partitions():
    rep = check("hcomb", ks=(3, 4), J_max=2, span=4, n_max=22)
    assert sum(o.indices.get("case") == "initial rows" for o in rep.outcomes) == 6


@pytest.mark.criterion(10)
def test_jacobi_specialisation():
    check("jacobi", ks=(2, 3, 4, 5, 6), order=100)


@pytest.mark.criterion(11)
def test_dictionary():
    check("dictionary", ks=(2, 3, 4, 5), j_max=5, order=50)


NEGATIVE = {
    "product_side": ["andrews-bressoud", "--k", "3", "--n-max", "20"],
    "theta_quotient": ["jacobi", "--k", "3", "--order", "30"],
    "euler_infty": ["jacobi", "--k", "3", "--order", "30"],
    "closed_form_official": ["shelf-j", "--k", "3", "--J-max", "1", "--n-max", "20"],
    "closed_form_ghost": ["ghosts", "--k", "3", "--J-max", "1", "--n-max", "20"],
    "recursion": ["recursion", "--k", "3", "--j-max", "3", "--order", "30"],
    "transfer": ["matrix", "--k", "3", "--j-max", "2", "--order", "30"],
    "h_step": ["matrix", "--k", "3", "--j-max", "2", "--order", "30"],
    "h_build": ["hcomb", "--k", "3", "--J-max", "1", "--span", "2", "--n-max", "18"],
    "h_limit": ["h-limit", "--k", "3", "--J-max", "1", "--order", "20"],
    "count_official": ["andrews-bressoud", "--k", "3", "--n-max", "20"],
    "count_ghost": ["ghosts", "--k", "3", "--J-max", "1", "--n-max", "20"],
    "count_h": ["hcomb", "--k", "3", "--J-max", "1", "--span", "2", "--n-max", "18"],
    "jtilde": ["dictionary", "--k", "3", "--j-max", "2", "--order", "20"],
    "jtildetilde": ["dictionary", "--k", "3", "--j-max", "2", "--order", "20"],
}


def qshelf(*argv):
    return subprocess.run([sys.executable, "-m", "qshelf", *argv], capture_output=True, text=True)


@pytest.mark.criterion(12)
@pytest.mark.parametrize("pipeline", sorted(NEGATIVE))
def test_negative_control(pipeline):
    argv = ["verify", *NEGATIVE[pipeline], "--format", "json"]
    clean = qshelf(*argv)
    assert clean.returncode == 0, clean.stderr
    for exponent, delta in ((5, 1), (13, -2)):
        proc = qshelf(*argv, "--inject-fault", f"{pipeline}:{exponent}:{delta}")
        assert proc.returncode == 1, proc.stderr
        cert = json.loads(proc.stderr)
        assert cert["exponent"] == exponent, cert
        assert json.loads(proc.stdout)["first_failure"] == cert
