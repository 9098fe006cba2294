import json
import os

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from ivfalsify.cli import EXIT_ERROR, EXIT_NOT_REJECTED, EXIT_REJECTED, RunConfig, Subcommand, main
from ivfalsify.config import get_settings
from ivfalsify.falsify import NON_REJECTION_CAVEAT, FalsifyReport
from ivfalsify.simlab import Regime, boundary_spec
from ivfalsify.simlab.dgp import sample
from ivfalsify.tabulate import JointCounts

from .helpers import counts_from_margins, frame_from_counts


def test_unconditional_not_rejected(write_csv, uniform_table, capsys):
    path = write_csv(frame_from_counts(uniform_table))
    assert main(["falsify-unconditional", str(path), "--method", "wald"]) == EXIT_NOT_REJECTED

    out = capsys.readouterr().out
    assert "Decision: the instrumental variable model is not rejected." in out
    assert NON_REJECTION_CAVEAT in out


def test_unconditional_exterior_sample_is_rejected(write_csv, capsys):
    table = sample(boundary_spec(Regime.EXTERIOR, (0, 1)), 10_000, seed=8)
    path = write_csv(frame_from_counts(table))
    assert main(["falsify-unconditional", str(path)]) == EXIT_REJECTED

    out = capsys.readouterr().out
    assert "Rejected H01" in out
    assert "ACDE(0) positive" in out


def test_json_output_matches_exit_status(write_csv, exterior_table, capsys):
    path = write_csv(frame_from_counts(exterior_table))
    status = main(["falsify-unconditional", str(path), "--format", "json", "--method", "wald"])

    report = FalsifyReport.model_validate_json(capsys.readouterr().out)
    assert status == (EXIT_REJECTED if report.overall_reject else EXIT_NOT_REJECTED)
    assert report.overall_reject


def test_column_mapping_and_median_dichotomization(write_csv, capsys):
    rng = np.random.default_rng(0)
    frame = pd.DataFrame(
        {
            "nearc4": rng.integers(0, 2, 400),
            "college": rng.integers(0, 2, 400),
            "wage": rng.lognormal(size=400),
        }
    )
    path = write_csv(frame)
    status = main(
        ["falsify-unconditional", str(path), "--z", "nearc4", "--d", "college", "--y", "wage", "--dichotomize", "median", "--method", "wald"]
    )
    assert status in (EXIT_NOT_REJECTED, EXIT_REJECTED)
    assert "Model: unconditional_binary" in capsys.readouterr().out


def test_conditional_gail_simon_reports_subgroup_count(write_csv, uniform_table, exterior_table, capsys):
    frame = pd.concat(
        [
            frame_from_counts(uniform_table, exper=2, region="north"),
            frame_from_counts(uniform_table, exper=7, region="south"),
            frame_from_counts(exterior_table, exper=12, region="south"),
        ]
    )
    path = write_csv(frame)
    status = main(
        ["falsify-conditional", str(path), "--covariates", "exper,region", "--bin", "exper=0,5,10,15"]
    )
    out = capsys.readouterr().out

    assert status == EXIT_REJECTED
    assert "ACDE(0) positive in some subgroup" in out
    assert any(line.rstrip().endswith("  3") for line in out.splitlines())


def test_conditional_per_level_mode(write_csv, uniform_table, capsys):
    frame = pd.concat(
        [frame_from_counts(uniform_table, race="a"), frame_from_counts(uniform_table, race="b")]
    )
    path = write_csv(frame)
    status = main(
        ["falsify-conditional", str(path), "--covariates", "race", "--mode", "per-level", "--method", "wald", "--format", "json"]
    )
    report = FalsifyReport.model_validate_json(capsys.readouterr().out)
    assert status == EXIT_NOT_REJECTED
    assert report.model == "conditional_binary_perlevel"
    assert {entry.level for entry in report.entries} == {0.05 / 4}


def test_discrete_instrument(write_csv, capsys):
    table = JointCounts(counts=np.full((3, 2, 2), 25))
    path = write_csv(frame_from_counts(table))
    assert main(["falsify-discrete", str(path), "--method", "wald"]) == EXIT_NOT_REJECTED
    assert "d=0" in capsys.readouterr().out

    frame = pd.concat([frame_from_counts(table, v="a"), frame_from_counts(table, v="b")])
    path = write_csv(frame, name="conditional.csv")
    assert main(["falsify-discrete", str(path), "--covariates", "v", "--method", "wald", "--format", "json"]) == EXIT_NOT_REJECTED
    assert json.loads(capsys.readouterr().out)["model"] == "conditional_discrete"


@pytest.mark.parametrize(
    "extra",
    [
        ["--method", "berger-boos"],
        ["--method", "wald", "--gamma", "0.001"],
        ["--method", "berger-boos", "--gamma", "0.03"],
        ["--y", "outcome"],
        ["--bin", "exper=0,5"],
    ],
)
def test_usage_and_data_errors_exit_two(write_csv, uniform_table, capsys, extra):
    path = write_csv(frame_from_counts(uniform_table))
    assert main(["falsify-unconditional", str(path), *extra]) == EXIT_ERROR
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "ivfalsify:" in captured.err


def test_unreadable_input_exits_two(tmp_path, capsys):
    assert main(["falsify-unconditional", str(tmp_path / "missing.csv")]) == EXIT_ERROR
    assert "ivfalsify:" in capsys.readouterr().err


def test_malformed_row_names_line(write_csv, capsys):
    path = write_csv(pd.DataFrame({"z": [0, 1, "x"], "d": [0, 1, 1], "y": [0, 1, 1]}))
    assert main(["falsify-unconditional", str(path)]) == EXIT_ERROR
    assert "row 4" in capsys.readouterr().err


def test_berger_boos_end_to_end(write_csv, capsys):
    table = counts_from_margins(p1=[0.25] * 4, p0=[0.25] * 4, n_per_arm=12)
    path = write_csv(frame_from_counts(table))
    status = main(["falsify-unconditional", str(path), "--method", "berger-boos", "--gamma", "0.001", "--format", "json"])
    report = FalsifyReport.model_validate_json(capsys.readouterr().out)
    assert status == EXIT_NOT_REJECTED
    assert report.metadata.gamma == 0.001


def test_simulate_appends_one_row_per_scenario(tmp_path, capsys):
    test = {"model": "unconditional_binary", "alpha": 0.05, "method": "wald"}
    scenarios = {
        "schema_version": "1.0",
        "scenarios": [
            {"id": regime.value, "spec": boundary_spec(regime).model_dump(), "n": 200, "reps": 5, "seed": 1, "test": test}
            for regime in (Regime.TWO_EQUALITIES, Regime.ONE_EQUALITY, Regime.INTERIOR)
        ],
    }
    path = tmp_path / "scenarios.json"
    path.write_text(json.dumps(scenarios))
    log = tmp_path / "runs.csv"

    assert main(["simulate", "--scenarios", str(path), "--log", str(log), "--seed", "5", "--workers", "1"]) == 0
    frame = pd.read_csv(log)
    assert len(frame) == 3
    assert set(frame["seed"]) == {5}
    assert len(capsys.readouterr().out.splitlines()) == 3


def test_run_config_validation():
    with pytest.raises(ValidationError):
        RunConfig(subcommand=Subcommand.SIMULATE)
    with pytest.raises(ValidationError):
        RunConfig(subcommand=Subcommand.FALSIFY_CONDITIONAL)
    config = RunConfig(subcommand=Subcommand.FALSIFY_UNCONDITIONAL, input="data.csv", method="berger-boos", gamma=0.001)
    assert config.test_method == "berger_boos"


@pytest.fixture
def fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


def test_ragged_csv_exits_two(tmp_path, capsys):
    path = tmp_path / "ragged.csv"
    path.write_text("z,d,y\n0,1,1\n1,0,1,5\n")
    assert main(["falsify-unconditional", str(path)]) == EXIT_ERROR
    assert "malformed" in capsys.readouterr().err


def test_empty_file_exits_two(tmp_path, capsys):
    path = tmp_path / "empty.csv"
    path.write_bytes(b"")
    assert main(["falsify-unconditional", str(path)]) == EXIT_ERROR
    assert "empty" in capsys.readouterr().err


def test_non_utf8_file_exits_two(tmp_path, capsys):
    path = tmp_path / "latin.csv"
    path.write_bytes(b"z,d,y\n0,1,1\n1,0,\xff\n")
    assert main(["falsify-unconditional", str(path)]) == EXIT_ERROR
    assert "UTF-8" in capsys.readouterr().err


def test_nan_outcome_exits_two_instead_of_dichotomizing(write_csv, capsys):
    path = write_csv(pd.DataFrame({"z": [0, 1, 1, 0], "d": [0, 1, 0, 1], "y": ["1", "5", "nan", "9"]}))
    assert main(["falsify-unconditional", str(path), "--dichotomize", "median"]) == EXIT_ERROR
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "row 4" in captured.err


def test_unknown_log_level_is_a_usage_error(write_csv, uniform_table, capsys):
    path = write_csv(frame_from_counts(uniform_table))
    with pytest.raises(SystemExit) as excinfo:
        main(["--log-level", "chatty", "falsify-unconditional", str(path)])
    assert excinfo.value.code == EXIT_ERROR
    assert "invalid choice" in capsys.readouterr().err

    assert main(["--log-level", "debug", "falsify-unconditional", str(path), "--method", "wald"]) == EXIT_NOT_REJECTED


def test_unknown_log_level_in_environment_exits_two(write_csv, uniform_table, monkeypatch, fresh_settings, capsys):
    path = write_csv(frame_from_counts(uniform_table))
    monkeypatch.setenv("IVFALSIFY_LOG_LEVEL", "chatty")
    assert main(["falsify-unconditional", str(path)]) == EXIT_ERROR
    assert "invalid configuration" in capsys.readouterr().err


def test_gail_simon_mode_rejects_test_method_options(write_csv, uniform_table, capsys):
    frame = pd.concat([frame_from_counts(uniform_table, race="a"), frame_from_counts(uniform_table, race="b")])
    path = write_csv(frame)
    for extra in (["--method", "wald"], ["--method", "berger-boos", "--gamma", "0.001"]):
        assert main(["falsify-conditional", str(path), "--covariates", "race", *extra]) == EXIT_ERROR
        assert "--mode per-level" in capsys.readouterr().err

    with pytest.raises(ValidationError):
        RunConfig(subcommand=Subcommand.FALSIFY_CONDITIONAL, input="data.csv", method="boschloo")
    assert RunConfig(subcommand=Subcommand.FALSIFY_CONDITIONAL, input="data.csv", conditional_mode="per-level", method="boschloo")


NLSYM_CSV = os.environ.get("IVFALSIFY_NLSYM_CSV")


@pytest.mark.skipif(not NLSYM_CSV, reason="set IVFALSIFY_NLSYM_CSV to a prepared NLSYM extract")
@pytest.mark.parametrize(
    ("covariates", "subgroups", "expected"),
    [
        ("experience", 24, [1.0, 0.010, 1.0, 0.034]),
        ("experience,race", 47, [1.0, 0.132, 1.0, 0.143]),
        ("experience,race,region", 819, [1.0, 1.0, 1.0, 1.0]),
    ],
)
def test_nlsym_subgroup_counts_and_p_values(covariates, subgroups, expected, capsys):
    """Expects columns z (college nearby), d (education after high school), y (wage), experience, race, region."""
    main(["falsify-conditional", NLSYM_CSV, "--covariates", covariates, "--dichotomize", "median", "--format", "json"])
    report = FalsifyReport.model_validate_json(capsys.readouterr().out)

    assert report.metadata.n_strata == subgroups
    for entry, p_value in zip(report.entries, expected):
        assert entry.p_value == pytest.approx(p_value, abs=0.01)
