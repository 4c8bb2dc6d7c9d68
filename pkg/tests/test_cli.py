import csv
import io
import json
import subprocess
import sys

import pytest

from qshelf import cli
from qshelf.series import Series
from qshelf.shelves import closed_form_ghost, closed_form_official


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_series_official(capsys):
    code, out, _ = run(capsys, "series", "--k", "3", "--shelf", "0", "--i", "1", "--order", "20")
    assert code == 0
    assert out.strip() == str(closed_form_official(3, 0, 1, 20))
    assert out.startswith("1 + ")


def test_series_ghost_json(capsys):
    code, out, _ = run(capsys, "series", "--k", "4", "--ghost", "--j", "2", "--i", "3", "--order", "30",
                       "--format", "json")
    assert code == 0
    js = json.loads(out)
    assert js["r"] == 9 and js["kind"] == "ghost"
    assert Series.from_json(js["series"]) == closed_form_ghost(4, 2, 3, 30)


@pytest.mark.parametrize("source", ["recursion", "count", "dictionary"])
def test_series_sources_agree(capsys, source):
    _, want, _ = run(capsys, "series", "--k", "3", "--j", "1", "--i", "2", "--order", "18")
    code, out, _ = run(capsys, "series", "--k", "3", "--j", "1", "--i", "2", "--order", "18", "--source", source)
    assert code == 0 and out == want


def test_series_csv(capsys):
    code, out, _ = run(capsys, "series", "--k", "2", "--j", "0", "--i", "2", "--order", "8", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["exponent", "coefficient"]
    assert rows[1:] == [[str(e), str(c)] for e, c in enumerate([1, 0, 1, 0, 1, 0, 2, 0, 2])]


def test_default_order_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("QSHELF_DEFAULT_ORDER", "7")
    _, out, _ = run(capsys, "series", "--k", "3", "--j", "0", "--i", "1")
    assert out.strip().endswith("O(q^8)")
    monkeypatch.setenv("QSHELF_DEFAULT_ORDER", "x")
    assert run(capsys, "series", "--k", "3", "--j", "0", "--i", "1")[0] == 2


@pytest.mark.parametrize("argv", [
    ["series", "--k", "3", "--j", "0", "--i", "4"],
    ["series", "--k", "3", "--j", "0", "--i", "1", "--ghost"],
    ["series", "--k", "1", "--j", "0", "--i", "1"],
    ["series", "--k", "3", "--j", "-1", "--i", "1"],
    ["verify", "andrews-bressoud", "--k", "1"],
    ["verify", "eh", "--jobs", "0"],
    ["verify", "nope"],
    ["count", "--k", "3", "--kind", "h", "--J", "0", "--j", "0", "--l", "1", "--i", "1"],
    ["hmatrix", "--k", "3", "--kind", "A", "--j", "0"],
    ["dictionary", "--k", "3", "--i", "3", "--ghost"],
    ["series", "--k", "3", "--j", "0", "--i", "1", "--inject-fault", "bogus:1"],
    ["series", "--k", "3", "--j", "0", "--i", "1", "--order", "-1"],
    [],
])
def test_usage_errors_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as info:
        sys.exit(cli.main(argv))
    assert info.value.code == 2


def test_verify_passes(capsys):
    code, out, _ = run(capsys, "verify", "andrews-bressoud", "--k", "3", "--n-max", "30")
    assert code == 0 and out.strip().endswith("3/3 cells pass")


def test_verify_eh_strong_k4(capsys):
    code, _, _ = run(capsys, "verify", "eh", "--k", "4", "--j-max", "10", "--strength", "strong")
    assert code == 0


def test_verify_eh_csv(capsys):
    code, out, _ = run(capsys, "verify", "eh", "--k", "3", "--j-max", "1", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["k", "j", "i", "kind", "strength", "f", "pass"]
    assert len(rows) == 1 + 2 * (3 + 2)
    assert all(r[-1] == "1" for r in rows[1:])


def test_verify_failure_prints_certificate(capsys):
    code, out, err = run(capsys, "verify", "eh", "--k", "2", "--j-max", "2", "--strength", "strong",
                         "--format", "json")
    assert code == 1
    cert = json.loads(err)
    assert cert["indices"] == {"k": 2, "j": 0, "i": 2, "kind": "ghost"} and cert["exponent"] == 2
    assert json.loads(out)["first_failure"] == cert


def test_injected_fault(capsys):
    code, _, err = run(capsys, "verify", "jacobi", "--k", "3", "--order", "30", "--inject-fault", "theta_quotient:9:-3")
    assert code == 1
    cert = json.loads(err)
    assert cert["exponent"] == 9
    # the fault does not leak into the next run
    assert run(capsys, "verify", "jacobi", "--k", "3", "--order", "30")[0] == 0


def test_jobs_do_not_change_output(capsys):
    base = ["verify", "hcomb", "--k", "3", "--n-max", "12", "--J-max", "1", "--span", "2", "--format", "json"]
    a = run(capsys, *base)
    b = run(capsys, *base, "--jobs", "4")
    assert a == b and a[0] == 0


def test_count_csv_and_witness(capsys):
    code, out, _ = run(capsys, "count", "--k", "2", "--r", "2", "--n-max", "6", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["k", "r", "n", "kind", "count"]
    assert rows[-1] == ["2", "2", "6", "official", "2"]
    code, out, _ = run(capsys, "count", "--k", "2", "--r", "2", "--n-max", "6", "--witness")
    assert [json.loads(line) for line in out.splitlines()] == [[], [2], [4], [6], [4, 2]]


def test_count_h(capsys):
    code, out, _ = run(capsys, "count", "--k", "3", "--kind", "h", "--J", "0", "--j", "1", "--l", "3",
                       "--i", "1", "--n-max", "3", "--format", "json")
    assert code == 0
    assert [r["count"] for r in json.loads(out)] == [0, 1, 1, 0]


def test_hmatrix_json(capsys):
    code, out, _ = run(capsys, "hmatrix", "--k", "3", "--J", "0", "--j", "2", "--order", "10", "--format", "json")
    js = json.loads(out)
    assert code == 0 and js["k"] == 3 and js["J"] == 0 and js["j"] == 2 and js["kind"] == "h"
    code, out, _ = run(capsys, "hmatrix", "--k", "4", "--kind", "B", "--j", "1", "--order", "5", "--format", "json")
    assert json.loads(out)["kind"] == "B"


def test_dictionary(capsys):
    code, out, _ = run(capsys, "dictionary", "--k", "3", "--i", "2", "--order", "10", "--format", "json")
    js = json.loads(out)
    assert code == 0 and js["terms"][0] == {"a": 0, "b": 0, "c": "1"}
    code, out, _ = run(capsys, "dictionary", "--k", "3", "--i", "3", "--j", "1", "--order", "10")
    assert out.strip() == str(closed_form_official(3, 1, 1, 10))


def test_output_file(capsys, tmp_path):
    path = tmp_path / "s.txt"
    code, out, _ = run(capsys, "series", "--k", "3", "--j", "0", "--i", "1", "--order", "5", "--output", str(path))
    assert code == 0 and out == ""
    assert path.read_text().startswith("1 + q")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qshelf", "series", "--k", "2", "--j", "0", "--i", "1",
                           "--order", "4"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip() == str(closed_form_official(2, 0, 1, 4))
