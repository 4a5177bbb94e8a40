"""Experiment harness, artifact files, verify suites, and the CLI.

Pipeline runs use a small interval configuration (n = 600, eps = 0.1) so the
whole file stays fast. Artifact checks assert the written layout, the 17-digit
round trip, byte-level determinism across repeated runs, and removal of
partial output when a later stage fails. CLI checks go through main(argv)
with captured stdout.
"""

import io
import contextlib
import math
from pathlib import Path

import numpy as np
import pytest

from lle_spectra import harness as hn
from lle_spectra.cli import main
from lle_spectra.harness import (
    SUPERCRITICAL_MIN,
    VERIFY_SUITES,
    ExperimentConfig,
    StageError,
    SubcriticalError,
    config_from_mapping,
    parse_config_file,
    run_compare,
    run_verify,
)
from lle_spectra.plotting import PlotStyle, Series, emit_plot
from lle_spectra.sampling import Domain

BASE = dict(domain=Domain.INTERVAL, epsilon=0.1, sizes=(600,), k=4)


def run_cli(argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


@pytest.fixture(scope="module")
def compare_out(tmp_path_factory):
    out = tmp_path_factory.mktemp("compare")
    reports = run_compare(ExperimentConfig(**BASE, out_dir=out))
    return out, reports


class TestPlotting:
    def test_series_validation(self):
        with pytest.raises(ValueError):
            Series("bad", (1.0, 2.0), (1.0,))
        with pytest.raises(ValueError):
            Series("empty", (), ())

    def test_svg_document(self):
        svg = emit_plot(
            [Series("errors", (1.0, 2.0, 4.0), (0.4, 0.2, 0.1))],
            PlotStyle(title="t", xlabel="n", ylabel="err", log_x=True, log_y=True),
        )
        assert svg.startswith("<svg")
        assert svg.rstrip().endswith("</svg>")
        assert "polyline" in svg
        assert "errors" in svg

    def test_svg_deterministic(self):
        args = [Series("a", (1.0, 2.0), (3.0, 4.0))]
        assert emit_plot(args) == emit_plot(args)

    def test_log_scale_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            emit_plot([Series("a", (0.0, 1.0), (1.0, 1.0))], PlotStyle(log_x=True))
        with pytest.raises(ValueError):
            emit_plot([], PlotStyle())


class TestConfig:
    def test_parse_config_file(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text(
            "# experiment\ndomain = interval\nepsilon = 0.1  # width\n\nallow-subcritical = yes\n"
        )
        values = parse_config_file(path)
        assert values == {"domain": "interval", "epsilon": "0.1", "allow_subcritical": "yes"}

    def test_parse_rejects_bare_line(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("epsilon\n")
        with pytest.raises(ValueError, match="bad.cfg:1"):
            parse_config_file(path)

    def test_mapping_round_trip(self):
        cfg = config_from_mapping(
            {
                "domain": "disc",
                "epsilon": "0.05",
                "m": "115, 161",
                "k": "12",
                "mode": "arnoldi",
                "kind": "neumann",
                "nu_max": "6",
                "lambda_max": "4.0",
                "out": "results",
                "seed": "3",
                "write_vectors": "true",
            }
        )
        assert cfg.domain is Domain.DISC
        assert cfg.sizes == (115, 161)
        assert cfg.k == 12
        assert cfg.lambda_max == 4.0
        assert cfg.out_dir == Path("results")
        assert cfg.write_vectors is True

    def test_mapping_rejects_unknown_key(self):
        with pytest.raises(ValueError, match="unknown config keys"):
            config_from_mapping({"epsilonn": "0.05"})

    def test_bool_parsing(self):
        assert config_from_mapping({"allow_subcritical": "on"}).allow_subcritical is True
        assert config_from_mapping({"allow_subcritical": "0"}).allow_subcritical is False
        with pytest.raises(ValueError, match="not a boolean"):
            config_from_mapping({"allow_subcritical": "maybe"})

    def test_validate_gates(self):
        with pytest.raises(ValueError, match="epsilon"):
            ExperimentConfig(**{**BASE, "epsilon": 0.2}).validate()
        with pytest.raises(ValueError, match="size"):
            ExperimentConfig(**{**BASE, "sizes": ()}).validate()
        with pytest.raises(ValueError, match="k must be"):
            ExperimentConfig(**{**BASE, "k": 0}).validate()


class TestRunCompare:
    def test_artifact_layout(self, compare_out):
        out, reports = compare_out
        assert sorted(p.name for p in out.iterdir()) == [
            "eigenvalue_convergence.svg",
            "eigenvalues_600.csv",
            "errors.svg",
            "meta.csv",
            "report.csv",
        ]
        assert len(reports) == 1
        assert reports[0].n == 600
        assert reports[0].supercriticality == pytest.approx(60.0)

    def test_report_rows(self, compare_out):
        out, reports = compare_out
        rows = reports[0].rows
        assert [r.index for r in rows] == [1, 2, 3, 4]
        # kernel row carries the absolute error of the near-zero eigenvalue
        assert rows[0].lam_analytic == 0.0
        assert rows[0].rel_error == abs(rows[0].lam_lle)
        assert rows[0].rel_error < 1e-10
        for row in rows[1:]:
            # coarse run (eps = 0.1, n = 600): errors are percent-level
            assert row.rel_error < 0.15
            assert row.rel_error == abs(row.lam_lle - row.lam_analytic) / row.lam_analytic

    def test_seventeen_digit_round_trip(self, compare_out):
        out, reports = compare_out
        lines = (out / "report.csv").read_text().splitlines()
        header = lines[0].split(",")
        by_name = {name: i for i, name in enumerate(header)}
        for row, line in zip(reports[0].rows, lines[1:]):
            cells = line.split(",")
            assert float(cells[by_name["lambda_analytic"]]) == row.lam_analytic
            assert float(cells[by_name["lambda_lle"]]) == row.lam_lle
            assert float(cells[by_name["rel_error"]]) == row.rel_error

    def test_per_size_file_matches_report(self, compare_out):
        out, _ = compare_out
        per_size = (out / "eigenvalues_600.csv").read_text().splitlines()
        report = (out / "report.csv").read_text().splitlines()
        assert per_size[0] == report[0].split(",", 1)[1]
        for left, right in zip(per_size[1:], report[1:]):
            assert left == right.split(",", 1)[1]

    def test_meta_file(self, compare_out):
        out, reports = compare_out
        lines = (out / "meta.csv").read_text().splitlines()
        assert lines[0] == "n,size_param,epsilon,asymmetry,supercriticality,mode,max_imag"
        cells = lines[1].split(",")
        assert cells[0] == "600"
        assert float(cells[2]) == 0.1
        assert float(cells[3]) == reports[0].asymmetry
        assert cells[5] == "dense"

    def test_byte_determinism(self, compare_out, tmp_path):
        out, _ = compare_out
        run_compare(ExperimentConfig(**BASE, out_dir=tmp_path))
        for path in out.iterdir():
            assert (tmp_path / path.name).read_bytes() == path.read_bytes()

    def test_subcritical_rejected_and_overridable(self, tmp_path):
        cfg = ExperimentConfig(**{**BASE, "sizes": (100,)}, out_dir=tmp_path / "a")
        with pytest.raises(SubcriticalError, match="allow_subcritical"):
            run_compare(cfg)
        reports = run_compare(
            ExperimentConfig(
                **{**BASE, "sizes": (100,)}, out_dir=tmp_path / "b", allow_subcritical=True
            )
        )
        assert reports[0].supercriticality < SUPERCRITICAL_MIN

    def test_partial_output_removed_on_failure(self, tmp_path):
        # first size succeeds and writes its file, second size aborts the run
        cfg = ExperimentConfig(**{**BASE, "sizes": (600, 100)}, out_dir=tmp_path)
        with pytest.raises(SubcriticalError) as err:
            run_compare(cfg)
        assert err.value.stage == "sampling"
        assert list(tmp_path.iterdir()) == []

    def test_stage_tag_on_config_error(self, tmp_path):
        cfg = ExperimentConfig(**{**BASE, "epsilon": 0.5}, out_dir=tmp_path)
        with pytest.raises(StageError, match="config"):
            run_compare(cfg)

    def test_vector_files(self, tmp_path):
        cfg = ExperimentConfig(**BASE, out_dir=tmp_path, write_vectors=True)
        run_compare(cfg)
        for i in (1, 2, 3, 4):
            path = tmp_path / f"eigvec_{i}.csv"
            assert path.exists()
            lines = path.read_text().splitlines()
            assert lines[0] == "x,value_lle,value_analytic,hyperbolic"
            assert len(lines) == 601


class TestVerifySuites:
    def test_all_pass(self):
        results = run_verify()
        assert [name for name, _, _ in results] == [name for name, _ in VERIFY_SUITES]
        for name, ok, detail in results:
            assert ok, f"{name}: {detail}"

    def test_suite_names(self):
        assert {name for name, _ in VERIFY_SUITES} == {
            "neighborhood-symmetry",
            "row-stochastic",
            "branch-continuity",
            "jet-arithmetic",
            "bessel-recurrence",
            "indicial-roots",
        }


class TestCli:
    def test_verify_command(self):
        code, out = run_cli(["verify"])
        assert code == 0
        assert out.strip().splitlines()[-1] == "all 6 suites passed"

    def test_analytic_spectrum(self):
        code, out = run_cli(
            ["analytic-spectrum", "--domain", "interval", "--epsilon", "0.05",
             "--k", "8", "--lambda-max", "75"]
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "index,nu,phase,lambda"
        assert len(lines) == 9
        assert lines[1] == "1,0,,0"
        lams = [float(line.split(",")[3]) for line in lines[1:]]
        assert lams == sorted(lams)

    def test_sample(self):
        code, out = run_cli(["sample", "--domain", "interval", "--epsilon", "0.1", "--n", "600"])
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "x"
        assert len(lines) == 601
        assert float(lines[1]) == 0.0
        assert float(lines[-1]) == 1.0

    def test_build_w_stdout(self):
        code, out = run_cli(
            ["build-w", "--domain", "interval", "--epsilon", "0.1", "--n", "64",
             "--allow-subcritical"]
        )
        assert code == 0
        lines = out.strip().splitlines()
        n, nnz, eps, c = lines[0].split()
        assert (int(n), int(nnz)) == (64, len(lines) - 1)
        assert float(eps) == 0.1

    def test_lle_spectrum(self):
        code, out = run_cli(
            ["lle-spectrum", "--domain", "interval", "--epsilon", "0.1", "--n", "600", "--k", "4"]
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "index,lambda"
        assert len(lines) == 5
        assert abs(float(lines[1].split(",")[1])) < 1e-10

    def test_compare_writes_files(self, tmp_path):
        code, _ = run_cli(
            ["compare", "--domain", "interval", "--epsilon", "0.1", "--n", "600",
             "--k", "4", "--out", str(tmp_path)]
        )
        assert code == 0
        assert (tmp_path / "report.csv").exists()
        assert (tmp_path / "eigenvalue_convergence.svg").exists()

    def test_appendix_demo(self, tmp_path):
        code, _ = run_cli(["appendix-demo", "--epsilon", "0.05", "--out", str(tmp_path)])
        assert code == 0
        lines = (tmp_path / "appendix_demo.csv").read_text().splitlines()
        assert lines[0] == "branch,beta,delta,integral,slope,cauchy_gap"
        assert len(lines) == 9
        assert {line.split(",")[0] for line in lines[1:]} == {"neumann", "singular"}
        # the singular branch carries the steep divergence slope
        singular_slope = float(lines[-1].split(",")[4])
        assert singular_slope <= -0.5

    def test_epsilon_gate_exits_two(self):
        code, _ = run_cli(["compare", "--domain", "interval", "--epsilon", "0.2", "--n", "600"])
        assert code == 2

    def test_stage_error_exits_one(self):
        code, _ = run_cli(["sample", "--domain", "interval", "--epsilon", "0.1", "--n", "100"])
        assert code == 1

    def test_unknown_flag_exits_two(self):
        with pytest.raises(SystemExit) as err:
            main(["compare", "--bogus", "1"])
        assert err.value.code == 2

    def test_config_file_and_flag_precedence(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text(
            "domain = interval\nepsilon = 0.1\nn = 32\nallow-subcritical = yes\n"
        )
        code, out = run_cli(["sample", "--config", str(path)])
        assert code == 0
        assert len(out.strip().splitlines()) == 33
        code, out = run_cli(["sample", "--config", str(path), "--n", "16"])
        assert code == 0
        assert len(out.strip().splitlines()) == 17
