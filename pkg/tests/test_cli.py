"""Tests for the command-line interface."""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path
from typing import Any

import pytest

from kdd_sampling import (
    KddConsistencyError,
    KddConvergenceError,
    KddDimensionError,
    KddFormatError,
    KddSizeLimitError,
    KddValidationError,
    __version__,
)
from kdd_sampling.cli import exit_code, main
from kdd_sampling.const import (
    EXIT_CONFIG,
    EXIT_CONSISTENCY,
    EXIT_CONVERGENCE,
    EXIT_DIMENSION,
    EXIT_ERROR,
    EXIT_FORMAT,
    EXIT_NOT_FOUND,
    EXIT_OK,
    EXIT_SIZE_LIMIT,
    EXIT_VALIDATION,
)
from kdd_sampling.formats import load_weight, read_array, read_pattern, write_sparse_weight
from kdd_sampling.weighting import threshold_w

CONFIG: dict[str, Any] = {
    "model": {"phase_dims": [8, 8], "coils": 4, "seed": 1},
    "designs": [
        {"name": "lattice", "algorithm": "uniform", "r_y": 2, "r_z": 2},
        {"name": "exact", "algorithm": "exact", "acceleration": 4},
    ],
    "recon": {"lambda": 0.001, "analytic": True},
}


def _run(capsys: pytest.CaptureFixture[str], *argv: str | Path) -> dict[str, Any]:
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    assert code == EXIT_OK, captured.err
    summary: dict[str, Any] = json.loads(captured.out)
    return summary


@pytest.fixture
def workspace(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> Path:
    """Return a directory holding a configuration, sensitivities and weights."""
    config = tmp_path / "experiment.json"
    config.write_text(json.dumps(CONFIG), encoding="utf-8")
    _run(capsys, "synth", "--config", config, "--out", tmp_path / "sens")
    _run(capsys, "compute-w", "--sens", tmp_path / "sens", "--out", tmp_path / "w")
    return tmp_path


class TestExitCodes:
    """Tests for exit_code."""

    @pytest.mark.parametrize(
        ("error", "code"),
        [
            (FileNotFoundError("x"), EXIT_NOT_FOUND),
            (KddDimensionError("x"), EXIT_DIMENSION),
            (KddFormatError("x"), EXIT_FORMAT),
            (KddConsistencyError("x"), EXIT_CONSISTENCY),
            (KddSizeLimitError("x", size=2, limit=1), EXIT_SIZE_LIMIT),
            (KddConvergenceError("x"), EXIT_CONVERGENCE),
            (KddValidationError("x"), EXIT_VALIDATION),
            (RuntimeError("x"), EXIT_ERROR),
        ],
    )
    def test_mapping(self, error: BaseException, code: int) -> None:
        """Test that specific errors win over their base classes."""
        assert exit_code(error) == code


class TestCommands:
    """End-to-end tests of the subcommands."""

    def test_version(self, capsys: pytest.CaptureFixture[str]) -> None:
        """Test the version flag."""
        with pytest.raises(SystemExit) as info:
            main(["--version"])
        assert info.value.code == 0
        assert __version__ in capsys.readouterr().out

    def test_synth_and_compute_w(self, workspace: Path) -> None:
        """Test the stored model, weights and manifests."""
        sens, _ = read_array(workspace / "sens")
        assert sens.shape == (1, 1, 4, 8, 8)
        assert load_weight(workspace / "w").values.shape == (1, 1, 8, 8)
        manifest = json.loads((workspace / "w.raw.manifest.json").read_text(encoding="utf-8"))
        assert manifest["command"] == "compute-w"
        assert [Path(item["path"]).name for item in manifest["inputs"]] == ["sens.json", "sens.raw"]

    def test_design_then_evaluate(
        self, workspace: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        """Test that evaluate reproduces the designed objective."""
        pattern = workspace / "p.txt"
        designed = _run(capsys, "design", "--w", workspace / "w", "--n", "16", "--out", pattern)
        assert designed["samples"] == 16
        assert read_pattern(pattern).total == 16
        assert Path(designed["manifest"]).exists()

        evaluated = _run(
            capsys,
            "evaluate",
            "--w",
            workspace / "w",
            "--pattern",
            pattern,
            "--sens",
            workspace / "sens",
            "--deltaj-map",
            workspace / "dj.pgm",
        )
        assert evaluated["objective"] == pytest.approx(designed["objective"], rel=1e-12)
        assert evaluated["moment2"] == pytest.approx(designed["objective"], rel=1e-9)
        assert evaluated["lower_bound"] <= evaluated["moment2"]
        assert (workspace / "dj.pgm").exists()
        assert (workspace / "dj.pgm.json").exists()

    def test_design_from_sparse_weights(
        self, workspace: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        """Test the approx designer driven by a sparse weight file."""
        sparse = write_sparse_weight(
            workspace / "w_hat.txt", threshold_w(load_weight(workspace / "w"), 8)
        )
        summary = _run(
            capsys,
            "design",
            "--sparse-w",
            sparse,
            "--algo",
            "approx",
            "--acceleration",
            "4",
            "--no-repeats",
            "--out",
            workspace / "p.txt",
        )
        assert summary["samples"] == 16
        assert summary["seconds"] is None

    def test_design_quotas(self, workspace: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Test quota options on a single-frame grid."""
        summary = _run(
            capsys,
            "design",
            "--w",
            workspace / "w",
            "--quota",
            "0:10",
            "--tie-break",
            "random",
            "--seed",
            "5",
            "--out",
            workspace / "p.txt",
        )
        assert summary["samples"] == 10

    def test_gfactor(self, workspace: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Test the analytic g-factor map and its rendering."""
        pattern = workspace / "p.txt"
        _run(
            capsys,
            "design",
            "--w",
            workspace / "w",
            "--algo",
            "uniform",
            "--r-y",
            "2",
            "--out",
            pattern,
        )
        summary = _run(
            capsys,
            "gfactor",
            "--sens",
            workspace / "sens",
            "--pattern",
            pattern,
            "--analytic",
            "--lambda",
            "1e-3",
            "--pgm",
            workspace / "g.pgm",
            "--out",
            workspace / "g",
        )
        gmap, header = read_array(workspace / "g")
        assert gmap.shape == (1, 8, 8)
        assert header.metadata["acceleration"] == 2.0
        assert summary["max"] >= summary["median"]
        assert (workspace / "g.pgm").exists()

    def test_caipi(self, workspace: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Test the ranked cell report."""
        report = workspace / "caipi.csv"
        summary = _run(
            capsys,
            "caipi",
            "--R",
            "2",
            "--w",
            workspace / "w",
            "--sens",
            workspace / "sens",
            "--lambda",
            "1e-3",
            "--report",
            report,
        )
        assert summary["cells"] == 3
        assert -1.0 <= summary["spearman"] <= 1.0
        assert summary["outliers"] in (0, 1, 2)
        with report.open(newline="", encoding="utf-8") as handle:
            rows = list(csv.DictReader(handle))
        assert [row["rank"] for row in rows] == ["0", "1", "2"]
        assert {row["outlier"] for row in rows} <= {"True", "False"}
        objectives = [float(row["objective"]) for row in rows]
        assert objectives == sorted(objectives)

    def test_power(self, workspace: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Test the power function output and the ΔJ table."""
        pattern = workspace / "p.txt"
        _run(capsys, "design", "--w", workspace / "w", "--n", "12", "--out", pattern)
        summary = _run(
            capsys,
            "power",
            "--sens",
            workspace / "sens",
            "--pattern",
            pattern,
            "--w",
            workspace / "w",
            "--out",
            workspace / "power",
            "--csv",
            workspace / "power.csv",
        )
        power, _ = read_array(workspace / "power")
        assert power.shape == (1, 8, 8)
        assert "spearman" in summary
        with (workspace / "power.csv").open(newline="", encoding="utf-8") as handle:
            assert len(list(csv.DictReader(handle))) == 64 - 12

    def test_flat_model_has_no_rank_correlation(
        self,
        tmp_path: Path,
        capsys: pytest.CaptureFixture[str],
        caplog: pytest.LogCaptureFixture,
    ) -> None:
        """Test that caipi and power succeed with a null correlation for S ≡ 1."""
        config = tmp_path / "flat.json"
        flat = {"model": {"kind": "support", "phase_dims": [8, 8]}, "designs": CONFIG["designs"]}
        config.write_text(json.dumps(flat), encoding="utf-8")
        _run(capsys, "synth", "--config", config, "--out", tmp_path / "sens")
        _run(capsys, "compute-w", "--sens", tmp_path / "sens", "--out", tmp_path / "w")
        pattern = tmp_path / "p.txt"
        _run(capsys, "design", "--w", tmp_path / "w", "--n", "12", "--out", pattern)

        with caplog.at_level(logging.WARNING, logger="kdd_sampling.cli"):
            caipi = _run(
                capsys,
                "caipi",
                "--R",
                "2",
                "--w",
                tmp_path / "w",
                "--sens",
                tmp_path / "sens",
                "--lambda",
                "1e-3",
                "--report",
                tmp_path / "caipi.csv",
            )
            power = _run(
                capsys,
                "power",
                "--sens",
                tmp_path / "sens",
                "--pattern",
                pattern,
                "--w",
                tmp_path / "w",
                "--out",
                tmp_path / "power",
            )
        assert caipi["cells"] == 3
        assert caipi["spearman"] is None
        assert caipi["outliers"] == 0
        assert power["spearman"] is None
        assert "No rank correlation for CAIPIRINHA cells" in caplog.text
        assert "No rank correlation for unsampled locations" in caplog.text

    def test_report(self, workspace: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Test the comparison report."""
        summary = _run(
            capsys,
            "report",
            "--config",
            workspace / "experiment.json",
            "--out",
            workspace / "report",
            "--manifest",
            workspace / "report.manifest.json",
        )
        assert [row["design"] for row in summary["rows"]] == ["lattice", "exact"]
        assert (workspace / "report" / "report.csv").exists()
        manifest = json.loads((workspace / "report.manifest.json").read_text(encoding="utf-8"))
        assert manifest["seeds"]["design.exact"] == 0


class TestErrors:
    """Tests for error reporting."""

    def test_missing_input(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Test that a missing file exits with its own code."""
        code = main(["evaluate", "--w", str(tmp_path / "w"), "--pattern", str(tmp_path / "p")])
        assert code == EXIT_NOT_FOUND
        assert capsys.readouterr().err.startswith("kdd evaluate: ")

    def test_invalid_config(self, tmp_path: Path) -> None:
        """Test that a schema violation exits with the configuration code."""
        config = tmp_path / "experiment.json"
        config.write_text(json.dumps({"model": {"phase_dims": [4]}}), encoding="utf-8")
        assert main(["synth", "--config", str(config), "--out", str(tmp_path / "s")]) == EXIT_CONFIG

    def test_design_without_count(self, workspace: Path) -> None:
        """Test that greedy designs need a sample count."""
        argv = ["design", "--w", str(workspace / "w"), "--out", str(workspace / "p.txt")]
        assert main(argv) == EXIT_CONFIG

    def test_bad_quota(self, workspace: Path) -> None:
        """Test a malformed quota option."""
        argv = ["design", "--w", str(workspace / "w"), "--quota", "x", "--out", "p.txt"]
        assert main(argv) == EXIT_CONFIG

    def test_mse_without_model(self, workspace: Path) -> None:
        """Test that the MSE comparator needs --sens."""
        argv = ["design", "--w", str(workspace / "w"), "--algo", "mse", "--n", "4"]
        argv += ["--out", str(workspace / "p.txt")]
        assert main(argv) == EXIT_VALIDATION

    def test_grid_mismatch(self, workspace: Path) -> None:
        """Test a pattern on another grid."""
        pattern = workspace / "p.txt"
        pattern.write_text("kdd-pattern v1 4 4 1\n0 0 0 1\n", encoding="ascii")
        argv = ["evaluate", "--w", str(workspace / "w"), "--pattern", str(pattern)]
        assert main(argv) == EXIT_DIMENSION

    def test_corrupt_pattern(self, workspace: Path) -> None:
        """Test a malformed pattern file."""
        pattern = workspace / "p.txt"
        pattern.write_text("not a pattern\n", encoding="ascii")
        argv = ["evaluate", "--w", str(workspace / "w"), "--pattern", str(pattern)]
        assert main(argv) == EXIT_FORMAT

    def test_bad_frame(self, workspace: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Test a ΔJ frame outside the pattern."""
        pattern = workspace / "p.txt"
        _run(capsys, "design", "--w", workspace / "w", "--n", "4", "--out", pattern)
        argv = ["evaluate", "--w", str(workspace / "w"), "--pattern", str(pattern)]
        argv += ["--frame", "1"]
        assert main(argv) == EXIT_VALIDATION
