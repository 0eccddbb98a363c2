"""CLI contract tests: CSV layouts, JSON report schema, exit codes, and
byte-level determinism of the verification reports."""

import csv
import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from symjacobi.cli import _check_entry, _ladder_entry, main
from symjacobi.core import JacobiParams
from symjacobi.estimates import EstimateReport
from symjacobi.kernels import semigroup_mass
from symjacobi.operators import mode_eigenvalues


def read_table(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][0].startswith("# symjacobi ")
    header = rows[1]
    data = rows[2:]
    return rows[0][0], header, data


class TestParsing:
    def test_bad_suite_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["verify", "--suite", "bogus"])
        assert exc.value.code == 2

    def test_missing_subcommand_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_unknown_subcommand_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["transmogrify"])
        assert exc.value.code == 2


class TestBasisTable:
    def test_layout_and_parity(self, tmp_path):
        out = tmp_path / "basis.csv"
        rc = main(
            ["basis", "--alpha", "0.5", "--beta", "2.0", "--nmax", "4",
             "--level", "1", "--out", str(out)]
        )
        assert rc == 0
        echo, header, data = read_table(out)
        assert "alpha=0.5" in echo and "beta=2.0" in echo and "nmax=4" in echo
        assert header == ["n", "parity", "theta", "phi"]
        table = {}
        for n, parity, th, val in data:
            assert parity == ("even" if int(n) % 2 == 0 else "odd")
            table[(int(n), float(th))] = float(val)
        n_theta = len({th for _, th in table})
        assert len(data) == 5 * n_theta
        # mode zero is constant; mirrored rows carry the parity sign
        zeros = [v for (n, _), v in table.items() if n == 0]
        assert np.ptp(zeros) == 0.0
        for (n, th), val in table.items():
            sign = 1.0 if n % 2 == 0 else -1.0
            assert_allclose(table[(n, -th)], sign * val, atol=1e-14)

    def test_writes_stdout_by_default(self, capsys):
        assert main(["basis", "--nmax", "0", "--level", "1"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[1] == "n,parity,theta,phi"
        assert len(lines) == 2 + 15


class TestKernelTable:
    def test_columns_and_identities(self, tmp_path):
        out = tmp_path / "kernel.csv"
        rc = main(
            ["kernel", "--alpha", "0.5", "--beta", "2.0", "--t", "0.8",
             "--level", "1", "--out", str(out)]
        )
        assert rc == 0
        _, header, data = read_table(out)
        assert header == ["t", "theta", "phi", "H", "H_tilde", "H_full", "mass"]
        vals = np.array([[float(x) for x in row] for row in data])
        params = JacobiParams(0.5, 2.0)
        # split identity, symmetry of H, and the half-line mass per theta row
        assert_allclose(vals[:, 5], vals[:, 3] + vals[:, 4], rtol=1e-12)
        h = {(r[1], r[2]): r[3] for r in vals}
        for (th, ph), v in h.items():
            assert_allclose(h[(ph, th)], v, rtol=1e-12)
        assert_allclose(vals[:, 6], semigroup_mass(params, 0.8), rtol=1e-10)

    def test_both_route_reports_difference(self, tmp_path):
        out = tmp_path / "kernel.csv"
        rc = main(["kernel", "--level", "1", "--route", "both", "--out", str(out)])
        assert rc == 0
        _, header, data = read_table(out)
        assert header[-1] == "rel_diff"
        diffs = np.array([float(row[-1]) for row in data])
        assert np.max(diffs) < 1e-6


class TestOperatorTable:
    def test_semigroup_on_input_file(self, tmp_path):
        src = tmp_path / "c.csv"
        src.write_text("coeff\n1.0\n0.0\n0.5\n")
        out = tmp_path / "o.csv"
        rc = main(
            ["operator", "--op", "semigroup", "--t", "0.5",
             "--input", str(src), "--out", str(out)]
        )
        assert rc == 0
        _, header, data = read_table(out)
        assert header == ["n", "value"]
        got = np.array([float(row[1]) for row in data])
        lam = mode_eigenvalues(JacobiParams(0.0, 0.0), 3)
        assert_allclose(got, np.array([1.0, 0.0, 0.5]) * np.exp(-0.5 * np.sqrt(lam)))

    def test_multiplier_matches_inverse_root(self, tmp_path):
        out = tmp_path / "o.csv"
        rc = main(
            ["operator", "--op", "multiplier", "--alpha", "0.5", "--beta", "0.5",
             "--nmax", "4", "--out", str(out)]
        )
        assert rc == 0
        _, _, data = read_table(out)
        got = np.array([float(row[1]) for row in data])
        coeffs = 0.5 ** np.arange(5)
        lam = mode_eigenvalues(JacobiParams(0.5, 0.5), 5)
        assert_allclose(got[1:], coeffs[1:] * lam[1:] ** -0.25, rtol=1e-6)

    def test_pointwise_ops_emit_theta_rows(self, tmp_path):
        for op in ("maximal", "gfun"):
            out = tmp_path / f"{op}.csv"
            rc = main(
                ["operator", "--op", op, "--nmax", "4", "--level", "1",
                 "--M", "1", "--N", "1", "--out", str(out)]
            )
            assert rc == 0
            _, header, data = read_table(out)
            assert header == ["theta", "value"]
            assert len(data) == 2**4 - 1
            assert all(float(row[1]) >= 0.0 for row in data)


class TestVerifyReports:
    FAST_SUITES = ("basis", "kernels", "operators", "ap")

    def test_fast_suites_pass_with_valid_schema(self, tmp_path):
        for suite in self.FAST_SUITES:
            path = tmp_path / f"{suite}.json"
            rc = main(["verify", "--suite", suite, "--report", str(path)])
            assert rc == 0, suite
            report = json.loads(path.read_text())
            assert report["schema_version"] == "1"
            assert report["passed"] is True and report["failures"] == []
            assert report["suite"] == suite
            for entry in report["results"]:
                assert set(entry) >= {"estimate_id", "levels", "verdict"}
                for lv in entry["levels"]:
                    assert set(lv) == {"level", "sup", "argmax"}
                    assert isinstance(lv["level"], int)

    def test_report_to_stdout_by_default(self, capsys):
        assert main(["verify", "--suite", "basis"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["schema_version"] == "1"

    def test_reports_are_byte_identical(self, tmp_path):
        for suite in ("kernels", "ap"):
            a, b = tmp_path / "a.json", tmp_path / "b.json"
            argv = ["verify", "--suite", suite, "--seed", "11"]
            assert main(argv + ["--report", str(a)]) == 0
            assert main(argv + ["--report", str(b)]) == 0
            assert a.read_bytes() == b.read_bytes()

    def test_stamp_isolated_in_header(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["verify", "--suite", "basis", "--report", str(a)]) == 0
        assert main(["verify", "--suite", "basis", "--stamp", "--report", str(b)]) == 0
        plain = json.loads(a.read_text())
        stamped = json.loads(b.read_text())
        assert "generated_at" not in plain
        assert stamped.pop("generated_at")
        assert stamped == plain

    def test_ap_suite_flags_out_of_window_weight(self, tmp_path):
        path = tmp_path / "ap.json"
        assert main(["verify", "--suite", "ap", "--report", str(path)]) == 0
        report = json.loads(path.read_text())
        verdicts = {e["member"]: e["verdict"] for e in report["results"]}
        assert verdicts[True] == "stable"
        assert verdicts[False] == "diverging"

    def test_module_error_exits_one(self, capsys, tmp_path):
        # kernel families need alpha, beta >= -1/2; the error is surfaced
        rc = main(
            ["verify", "--suite", "estimates", "--alpha", "-0.9",
             "--report", str(tmp_path / "r.json")]
        )
        assert rc == 1
        assert "error" in capsys.readouterr().err

    def test_entry_builders_record_failures(self):
        failures = []
        entry = _check_entry("BasisOrthonormality", 1, 2.0, (0, 0), 1.0, failures)
        assert entry["verdict"] == "diverging" and len(failures) == 1
        rep = EstimateReport("Growth", 1, 1.0, 10, (0.5, 0.6))
        entry = _ladder_entry("Growth", [rep], "inconclusive", failures)
        assert entry["levels"][0]["argmax"] == [0.5, 0.6]
        assert len(failures) == 2


class TestApCheck:
    def test_member_and_nonmember(self, capsys, tmp_path):
        out = tmp_path / "ladder.csv"
        rc = main(["ap-check", "--r", "1", "--s", "-1", "--out", str(out)])
        assert rc == 0
        assert "ladder verdict: stable" in capsys.readouterr().out
        _, header, data = read_table(out)
        assert header == ["depth", "constant"]
        assert [int(row[0]) for row in data] == [3, 4, 5, 6]

        rc = main(["ap-check", "--r", "2.5", "--s", "0"])
        assert rc == 0
        assert "ladder verdict: diverging" in capsys.readouterr().out

    def test_p_one_endpoint(self, capsys):
        rc = main(["ap-check", "--r", "-0.5", "--s", "0", "--p", "1"])
        assert rc == 0
        assert "predicts: member" in capsys.readouterr().out
