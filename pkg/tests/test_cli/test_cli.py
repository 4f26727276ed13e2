import json

import pandas as pd
import pytest

from blaschke_cyclicity.cli import main
from blaschke_cyclicity.config import CyclicityPaths
from blaschke_cyclicity.core import toeplitz
from blaschke_cyclicity.core.hardy import HardyFunction


def bundled(name: str) -> str:
    return str(CyclicityPaths.fixtures / name)


def write_config(tmp_path, settings: dict, name: str = "run.json") -> str:
    path = tmp_path / name
    path.write_text(json.dumps(settings), encoding="utf-8")
    return str(path)


def read_report(folder, subcommand: str) -> dict:
    stem = subcommand.replace("-", "_")
    return json.loads((folder / f"{stem}_report.json").read_text(encoding="utf-8"))


def test_decompose(tmp_path):
    assert main(["decompose", "--config", bundled("decompose_z2.json"), "--out", str(tmp_path)]) == 0

    report = read_report(tmp_path, "decompose")
    assert report["version"] == "v0.1.0"
    assert report["subcommand"] == "decompose"
    assert report["seed"] == 0
    assert report["policy"]["grid_size"] == 2048
    assert report["result"]["components"] == [[[3.0, 0.0], [2.0, 0.0]], [[1.0, 0.0], [4.0, 0.0]]]
    assert report["result"]["truncation_index"] == 1

    norms = pd.read_csv(tmp_path / "decompose_norms.csv")
    assert list(norms.columns) == ["k", "norm"]


def test_reports_are_byte_identical(tmp_path):
    for folder in ("first", "second"):
        args = ["decompose", "--config", bundled("decompose_z2.json"), "--out", str(tmp_path / folder)]
        assert main(args) == 0
    first = (tmp_path / "first" / "decompose_report.json").read_bytes()
    assert first == (tmp_path / "second" / "decompose_report.json").read_bytes()


def test_seeded_suite_is_reproducible(tmp_path):
    config = write_config(tmp_path, {"parameters": {"battery_size": 1}})
    codes = [
        main(["invariant-suite", "--config", config, "--seed", "9", "--out", str(tmp_path / folder)])
        for folder in ("first", "second")
    ]
    assert codes[0] == codes[1]
    first = (tmp_path / "first" / "invariant_suite_report.json").read_bytes()
    assert first == (tmp_path / "second" / "invariant_suite_report.json").read_bytes()


def test_malformed_configuration(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{\"blaschke\": ", encoding="utf-8")
    assert main(["decompose", "--config", str(path), "--out", str(tmp_path)]) == 2
    assert "Configuration error" in capsys.readouterr().err
    assert not list(tmp_path.glob("*_report.json"))


def test_bandwidth_overflow_names_the_feasible_terms(tmp_path, capsys):
    settings = {
        "blaschke": {"zeros": [{"re": 0.0, "im": 0.0, "mult": 2}]},
        "lacunary": {"exponents": [1, 200], "components": [[1, 0], [0, 1]]},
    }
    config = write_config(tmp_path, settings)
    assert main(["decompose", "--config", config, "--out", str(tmp_path)]) == 2
    assert "feasible" in capsys.readouterr().err


def test_bad_policy_assignment(tmp_path, capsys):
    args = ["kernel-growth", "--policy", "N=abc", "--out", str(tmp_path)]
    assert main(args) == 2
    assert "N=" in capsys.readouterr().err


def test_invalid_parameter(tmp_path):
    settings = {
        "blaschke": {"zeros": [{"re": 0.5, "im": 0.0, "mult": 1}]},
        "function": {"coeffs": [1, 2]},
        "parameters": {"iterations": -1},
    }
    assert main(["iterate", "--config", write_config(tmp_path, settings), "--out", str(tmp_path)]) == 2


def test_iterate_rejects_p_before_computing(tmp_path, monkeypatch):
    calls = []
    monkeypatch.setattr(toeplitz, "iterate_T", lambda *args: calls.append(args))
    settings = {
        "blaschke": {"zeros": [{"re": 0.5, "im": 0.0, "mult": 1}]},
        "function": {"coeffs": [1, 2]},
        "parameters": {"p": 0.5},
    }
    assert main(["iterate", "--config", write_config(tmp_path, settings), "--out", str(tmp_path)]) == 2
    assert calls == []


def test_iterate_remainder_inconsistency(tmp_path, capsys, monkeypatch):
    monkeypatch.setattr(
        toeplitz, "_remainder_integral", lambda product, f, m, **kwargs: HardyFunction.zero(f.policy)
    )
    assert main(["iterate", "--config", bundled("iterate_rational.json"), "--out", str(tmp_path)]) == 3
    assert "Remainder r_0" in capsys.readouterr().err
    assert not (tmp_path / "iterate_report.json").exists()


def test_numerical_inconsistency(tmp_path, capsys, monkeypatch):
    monkeypatch.setattr(toeplitz.Decomposition, "parseval_defect", lambda self: 1.0)
    assert main(["decompose", "--config", bundled("decompose_z2.json"), "--out", str(tmp_path)]) == 3
    assert "Numerical inconsistency" in capsys.readouterr().err


@pytest.mark.parametrize(
    "name, verdict",
    [
        ("cyclicity_alternating.json", "cyclic"),
        ("cyclicity_collinear.json", "non_cyclic"),
        ("cyclicity_two_component.json", "inconclusive"),
    ],
)
def test_cyclicity_verdicts_exit_zero(tmp_path, name, verdict):
    assert main(["cyclicity", "--config", bundled(name), "--out", str(tmp_path)]) == 0
    result = read_report(tmp_path, "cyclicity")["result"]
    assert result["verdict"] == verdict
    assert result["reducing_subspace"]["passed"]
    assert (tmp_path / "cyclicity_distances.csv").exists()


def test_cyclicity_report_contents(tmp_path):
    assert main(["cyclicity", "--config", bundled("cyclicity_alternating.json"), "--out", str(tmp_path)]) == 0
    result = read_report(tmp_path, "cyclicity")["result"]
    assert result["fixture"] == "alternating_z2"
    assert result["kstar"]["rank"] == 2
    assert result["krylov"]["iterations"] == 512
    assert len(result["iterate_span_defect"]) == 4
    history = pd.read_csv(tmp_path / "cyclicity_krylov_history.csv")
    assert list(history.columns) == ["n", "target", "distance"]


def test_exhaustive_witness_mode(tmp_path):
    settings = {
        "lacunary": {"fixture": "alternating_z2"},
        "parameters": {"witness_mode": "exhaustive", "oracle_iterations": 0},
    }
    assert main(["cyclicity", "--config", write_config(tmp_path, settings), "--out", str(tmp_path)]) == 0
    result = read_report(tmp_path, "cyclicity")["result"]
    assert result["exhaustive_witness"]["mode"] == "exhaustive"
    assert result["krylov"] is None


def test_iterate(tmp_path):
    assert main(["iterate", "--config", bundled("iterate_rational.json"), "--out", str(tmp_path)]) == 0
    result = read_report(tmp_path, "iterate")["result"]
    assert len(result["iterate_norms"]) == 17
    assert len(result["remainders"]) == 9
    assert result["p"] == 1.0
    assert (tmp_path / "iterate_projection_profile.csv").exists()


def test_lacunary_check(tmp_path):
    assert main(["lacunary-check", "--config", bundled("lacunary_check_b2.json"), "--out", str(tmp_path)]) == 0
    result = read_report(tmp_path, "lacunary-check")["result"]
    assert result["hypotheses"]["b2"]
    assert result["hypotheses"]["lacunary"]
    assert result["l4_l1"]["holds_l2"]
    assert result["series"]["terms"] >= 1
    norms = pd.read_csv(tmp_path / "lacunary_check_norms.csv")
    assert len(norms) == 4


def test_lacunary_check_rejects_small_p(tmp_path):
    settings = {
        "blaschke": {"zeros": [{"re": 0.0, "im": 0.0, "mult": 2}]},
        "lacunary": {"exponents": [1, 3], "components": [[1, 0], [0, 1]]},
        "parameters": {"p": 1.5},
    }
    config = write_config(tmp_path, settings)
    assert main(["lacunary-check", "--config", config, "--out", str(tmp_path)]) == 2


def test_kernel_growth(tmp_path):
    assert main(["kernel-growth", "--config", bundled("kernel_growth.json"), "--out", str(tmp_path)]) == 0
    result = read_report(tmp_path, "kernel-growth")["result"]
    assert len(result["table"]) == 8
    assert result["strictly_increasing"]
    assert (tmp_path / "kernel_growth_table.csv").exists()


def test_vacuous_suite_exits_zero(tmp_path):
    config = write_config(tmp_path, {"parameters": {"battery_size": 0}})
    assert main(["invariant-suite", "--config", config, "--out", str(tmp_path)]) == 0
    result = read_report(tmp_path, "invariant-suite")["result"]
    assert result["vacuous"]
    assert result["invariants"] == []


def test_aliased_suite_fails(tmp_path):
    args = ["invariant-suite", "--config", bundled("invariant_suite_aliased.json"), "--out", str(tmp_path)]
    assert main(args) == 1
    result = read_report(tmp_path, "invariant-suite")["result"]
    assert not result["all_passed"]


def test_argument_errors():
    with pytest.raises(SystemExit):
        main([])
    with pytest.raises(SystemExit):
        main(["plot"])
    with pytest.raises(SystemExit):
        main(["--version"])
