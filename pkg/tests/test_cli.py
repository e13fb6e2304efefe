"""Command-line pipeline: generate -> estimate -> evaluate, and the
validate-kernels sweep."""

import json

import numpy as np
import pytest

from ctkreg.cli import main


@pytest.fixture(scope="module")
def campaign_dir(tmp_path_factory):
    """A 3-trial D3 campaign run end to end through the CLI entry point."""
    out = tmp_path_factory.mktemp("campaign")
    assert main([
        "generate", "--bank", "D3", "--trials", "3", "--seed", "5",
        "--out", str(out),
    ]) == 0
    assert main([
        "estimate", "--data", str(out), "--combo", "zoh-za", "--transient", "on",
        "--starts", "4", "--rest-starts", "1", "--maxfev", "250", "--seed", "5",
        "--verbose",
    ]) == 0
    assert main(["evaluate", "--data", str(out)]) == 0
    return out


class TestPipeline:
    def test_generate_layout(self, campaign_dir):
        manifest = json.loads((campaign_dir / "config.json").read_text())
        assert manifest["bank"] == "D3" and manifest["trials"] == 3
        for trial in range(3):
            tdir = campaign_dir / f"trial{trial:03d}"
            for name in ("train.csv", "validation.csv", "past.csv", "truth.json"):
                assert (tdir / name).exists()
            train = np.loadtxt(tdir / "train.csv", delimiter=",")
            assert train.shape == (100, 3)
            # noisy output differs from the noiseless column
            assert not np.allclose(train[:, 1], train[:, 2])

    def test_estimate_outputs(self, campaign_dir):
        for trial in range(3):
            tdir = campaign_dir / f"trial{trial:03d}"
            hp = json.loads((tdir / "hyperparameters.json").read_text())
            assert {"alpha", "beta", "lambda", "sigma2", "alpha_t", "nll"} <= set(hp)
            assert hp["combo"] == "zoh-za" and hp["transient"] is True
            ghat = np.loadtxt(tdir / "ghat.csv", delimiter=",")
            assert ghat.shape == (50000, 2)
            assert (tdir / "start_objectives.csv").exists()  # --verbose traces

    def test_evaluate_summary(self, campaign_dir):
        summary = json.loads((campaign_dir / "summary.json").read_text())
        assert summary["bank"] == "D3"
        assert summary["fit_g"]["n_trials"] == 3
        assert not summary["partial"]
        rows = (campaign_dir / "fit_g.csv").read_text().strip().splitlines()
        assert len(rows) == 4  # header + 3 trials

    def test_estimate_deterministic(self, campaign_dir, tmp_path):
        """Same data and seed produce byte-identical hyperparameters."""
        first = (campaign_dir / "trial001" / "hyperparameters.json").read_text()
        before = json.loads(first)
        assert main([
            "estimate", "--data", str(campaign_dir), "--combo", "zoh-za",
            "--transient", "on", "--starts", "4", "--rest-starts", "1",
            "--maxfev", "250", "--seed", "5",
        ]) == 0
        after = json.loads(
            (campaign_dir / "trial001" / "hyperparameters.json").read_text()
        )
        for key in ("alpha", "beta", "lambda", "sigma2", "alpha_t", "nll"):
            assert before[key] == after[key]


class TestEvaluateErrors:
    def test_missing_estimates(self, tmp_path):
        out = tmp_path / "fresh"
        assert main([
            "generate", "--bank", "D3", "--trials", "1", "--seed", "0",
            "--out", str(out),
        ]) == 0
        assert main(["evaluate", "--data", str(out)]) == 1

    def test_not_a_campaign_dir(self, tmp_path):
        assert main(["evaluate", "--data", str(tmp_path)]) == 1


class TestValidateKernels:
    def test_small_sweep_passes(self, capsys):
        code = main([
            "validate-kernels", "--draws", "8", "--seed", "3",
            "--cov-instances", "1",
        ])
        out = capsys.readouterr().out
        assert code == 0
        assert "PASS" in out and "FAIL" not in out

    def test_combo_filter(self, capsys):
        code = main([
            "validate-kernels", "--draws", "4", "--seed", "3",
            "--combo", "bl-pa", "--skip-covariance",
        ])
        out = capsys.readouterr().out
        assert code == 0
        assert "fourier" in out and "kappa_gd " not in out

    def test_perturbation_canary(self, capsys):
        code = main([
            "validate-kernels", "--draws", "4", "--seed", "3",
            "--perturb-scale", "1.001", "--skip-covariance",
        ])
        assert code == 1
        assert "FAIL" in capsys.readouterr().out
