"""End-to-end tests of the command line interface."""

import json

import numpy as np
import pytest

import csphere as cs
from csphere.cli import main


@pytest.fixture
def spec_file(tmp_path):
    p = tmp_path / "exp.ini"
    p.write_text(
        "[system]\nm = 2\nn = 2\nconstellation = psk:4\n"
        "[experiment]\nsnr_db = 8, 14\ntrials = 12\nseed = 77\n"
        "[detectors]\nlist = sd, csd\n"
    )
    return p


class TestRun:
    def test_writes_csv_deterministically(self, spec_file, tmp_path):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        assert main(["run", "--spec", str(spec_file), "--out", str(out1)]) == 0
        assert main(["run", "--spec", str(spec_file), "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        header = out1.read_text().splitlines()[0]
        assert header == "detector,snr_db,mean_flops,stderr_flops,ser,mean_ped,mean_cc,mean_restarts,trials"

    def test_flag_overrides(self, spec_file, tmp_path):
        out = tmp_path / "c.csv"
        code = main(
            ["run", "--spec", str(spec_file), "--trials", "3", "--snr", "12", "--out", str(out)]
        )
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 1 + 2  # header + 2 detectors x 1 snr

    def test_json_mirror(self, spec_file, tmp_path):
        out = tmp_path / "r.csv"
        j = tmp_path / "r.json"
        main(["run", "--spec", str(spec_file), "--trials", "2", "--out", str(out), "--json", str(j)])
        assert json.loads(j.read_text())

    def test_without_spec_file(self, tmp_path):
        out = tmp_path / "d.csv"
        code = main(
            [
                "run", "--m", "2", "--n", "2", "--constellation", "psk:2",
                "--snr", "10", "--trials", "4", "--seed", "1",
                "--detectors", "sd", "--out", str(out),
            ]
        )
        assert code == 0

    def test_bad_detector_is_diagnosed(self, spec_file, tmp_path):
        code = main(
            ["run", "--spec", str(spec_file), "--detectors", "nope", "--out", str(tmp_path / "x.csv")]
        )
        assert code == 1


class TestBounds:
    def test_stdout_table(self, capsys):
        assert main(["bounds", "--n", "4", "--L", "16", "--snr", "5,15"]) == 0
        out = capsys.readouterr().out
        lines = out.strip().splitlines()
        assert lines[0].startswith("snr_db,alpha")
        assert len(lines) == 3

    def test_constellation_intra_distance(self, tmp_path, capsys):
        assert main(["bounds", "--n", "2", "--constellation", "qam:16", "--snr", "10"]) == 0
        out = capsys.readouterr().out
        row = out.strip().splitlines()[1].split(",")
        assert float(row[2]) == pytest.approx(2.0)

    def test_needs_size_or_constellation(self):
        assert main(["bounds", "--n", "2", "--snr", "10"]) == 1


class TestOracle:
    def test_solves_instance_file(self, tmp_path, capsys, qpsk):
        inst = cs.make_instance(qpsk, 2, 2, 0.05, cs.substream_rng(5))
        payload = {
            "H": [[[z.real, z.imag] for z in row] for row in inst.h],
            "r": [[z.real, z.imag] for z in inst.r],
            "constellation": "psk:4",
        }
        p = tmp_path / "inst.json"
        p.write_text(json.dumps(payload))
        assert main(["oracle", "--instance", str(p)]) == 0
        result = json.loads(capsys.readouterr().out)
        got = np.array([complex(a, b) for a, b in result["s_hat"]])
        want = cs.detect_ml_bruteforce(inst.h, inst.r, qpsk)
        assert np.abs(got - want).max() < 1e-12
        assert result["distance_sq"] == pytest.approx(
            cs.residual_sq(inst.h, inst.r, want)
        )


class TestReport:
    def test_table_and_figures(self, spec_file, tmp_path):
        out = tmp_path / "res.csv"
        main(["run", "--spec", str(spec_file), "--out", str(out)])
        report = tmp_path / "report.txt"
        figs = tmp_path / "figs"
        code = main(
            [
                "report", "--results", str(out), "--baseline", "sd",
                "--out", str(report), "--figures", str(figs),
            ]
        )
        assert code == 0
        assert "FLOP reduction vs sd" in report.read_text()
        assert (figs / "complexity.png").stat().st_size > 0
        assert (figs / "reduction.png").stat().st_size > 0
        assert (figs / "ser.png").exists()

    def test_no_figures_flag(self, spec_file, tmp_path, capsys):
        out = tmp_path / "res.csv"
        main(["run", "--spec", str(spec_file), "--out", str(out)])
        capsys.readouterr()
        assert main(["report", "--results", str(out), "--baseline", "sd", "--no-figures"]) == 0
        assert "reduction" in capsys.readouterr().out
        assert not (tmp_path / "complexity.png").exists()

    def test_missing_baseline_diagnosed(self, spec_file, tmp_path):
        out = tmp_path / "res.csv"
        main(["run", "--spec", str(spec_file), "--out", str(out)])
        assert main(["report", "--results", str(out), "--baseline", "zf"]) == 1
