import csv
import io
import json
import subprocess
import sys

import pytest

from permlab.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_moments_table(capsys):
    code, out = run_cli(capsys, "moments", "--n", "1,2,3,4", "--power", "4", "--samples", "100000",
                        "--seed", "3")
    rows = rows_of(out)
    assert list(rows[0]) == ["n", "kind", "power", "closed_form", "mc_mean", "stderr", "samples", "seed",
                             "check"]
    assert [r["closed_form"] for r in rows] == ["2", "12", "144", "2880"]
    assert code == (0 if all(r["check"] == "OK" for r in rows) else 1)


def test_moments_real(capsys):
    _, out = run_cli(capsys, "moments", "--n", "2", "--kind", "real", "--power", "4", "--samples", "1000")
    assert rows_of(out)[0]["closed_form"] == "24"


def test_figure1_rows(capsys):
    code, out = run_cli(capsys, "figure1", "--c", "1e-8,2")
    rows = rows_of(out)
    assert code == 0
    tiny, two = rows
    for key in ("corr_asymptotic", "corr_n10", "corr_n20", "corr_n30"):
        assert abs(float(tiny[key]) - 1) < 1e-4
    assert abs(float(two["corr_asymptotic"]) - 0.872693) < 1e-5
    gap = lambda r, k: abs(float(r[k]) - float(r["corr_asymptotic"]))
    assert gap(two, "corr_n30") < gap(two, "corr_n10")


@pytest.mark.parametrize("argv", [
    ["figure1", "--c", "0"],
    ["figure1", "--c", "-1,2"],
    ["corr", "--n", "3", "--epsilon", "0.1", "--c", "1"],
    ["corr", "--kind", "quaternion"],
    ["moments", "--samples", "10"],
    ["bogus"],
])
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_corr_table(capsys):
    code, out = run_cli(capsys, "corr", "--n", "3", "--epsilon", "0,0.3", "--samples", "20000", "--seed", "1")
    rows = rows_of(out)
    assert code == 0
    assert rows[0]["corr_closed"] == "1" and rows[0]["corr_mc"] == "1"
    assert all(r["check"] == "OK" for r in rows)


def test_corr_real_and_capacity(capsys):
    with pytest.warns(UserWarning):
        code, out = run_cli(capsys, "corr", "--n", "3,9", "--epsilon", "0.3", "--kind", "real",
                            "--samples", "5000")
    rows = rows_of(out)
    assert rows[1]["check"] == "SKIP" and rows[1]["corr_mc"] == ""
    assert rows[0]["kind"] == "real"
    assert code == 0


def test_corr_full_noise_row(capsys):
    with pytest.warns(UserWarning):
        code, out = run_cli(capsys, "corr", "--n", "4", "--epsilon", "1", "--samples", "200")
    row = rows_of(out)[0]
    assert row["check"] == "SKIP" and float(row["corr_closed"]) == pytest.approx(0.5)
    assert code == 0


def test_truncate_table(capsys):
    code, out = run_cli(capsys, "truncate", "--n", "5", "--epsilon", "0.5", "--d", "0,2,4,6,10",
                        "--samples", "200", "--seed", "5")
    rows = rows_of(out)
    assert code == 0
    assert float(rows[0]["bound_exact"]) == 1
    assert float(rows[-1]["bound_exact"]) == 0 and abs(float(rows[-1]["mse_empirical"])) < 1e-12


def test_cycles_table(capsys):
    code, out = run_cli(capsys, "cycles", "--n", "1,2,3,4")
    rows = rows_of(out)
    assert code == 0
    assert [r["cycle_sum"] for r in rows] == ["2", "6", "24", "120"]
    assert [r["literal_n_plus_1"] for r in rows] == ["2", "3", "4", "5"]
    assert [r["top_weight_pairsum"] for r in rows] == ["2", "12", "144", "2880"]


def test_boson_report(capsys):
    code, out = run_cli(capsys, "boson", "--n", "2", "--m", "4", "--epsilon", "0.3", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data["n"] == 2 and data["m"] == 4 and len(data["outcomes"]) == 10
    assert abs(sum(o["p_noisy"] for o in data["outcomes"]) - 1) < 1e-10


def test_boson_grid(capsys):
    code, out = run_cli(capsys, "boson", "--n", "2", "--epsilon", "0,0.5,1", "--seed", "4")
    rows = rows_of(out)
    assert code == 0
    assert list(rows[0])[:3] == ["outcome", "mu", "p_ideal"]
    assert "p_noisy[eps=0.5]" in rows[0]
    assert all(r["p_noisy[eps=0]"] == r["p_ideal"] for r in rows)


def test_json_mirrors_csv(capsys):
    argv = ["cycles", "--n", "1,2,3"]
    _, text = run_cli(capsys, *argv)
    _, js = run_cli(capsys, *argv, "--format", "json")
    data = json.loads(js)
    rows = rows_of(text)
    assert data["columns"] == list(rows[0])
    for jr, cr in zip(data["rows"], rows):
        assert [("" if v is None else str(v)) for v in jr.values()] == list(cr.values())


def test_out_path(tmp_path, capsys):
    target = tmp_path / "fig.csv"
    code = main(["figure1", "--c", "1", "--out", str(target)])
    assert code == 0
    assert capsys.readouterr().out == ""
    assert target.read_text().startswith("c,corr_asymptotic")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "permlab", "cycles", "--n", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1].startswith("3,24,24")
