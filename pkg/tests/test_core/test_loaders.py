import json

import numpy as np
import pytest

from blaschke_cyclicity.config import CyclicityPaths
from blaschke_cyclicity.core.enums import ValidSubcommands
from blaschke_cyclicity.core.loaders import load_run_config, read_config_file

Z2 = {"zeros": [{"re": 0.0, "im": 0.0, "mult": 2}]}


def test_decompose_configuration():
    config = load_run_config({"blaschke": Z2, "function": {"coeffs": [3, 2, 1, 4]}}, "decompose")
    assert config.subcommand == ValidSubcommands.DECOMPOSE
    assert config.product.degree == 2
    np.testing.assert_allclose(config.function.coeffs[:4], [3, 2, 1, 4])
    assert config.parameters == {"K": None}
    assert config.seed == 0
    assert config.output_directory == CyclicityPaths.output


def test_rational_function_section():
    settings = {
        "blaschke": Z2,
        "function": {"rational": {"poles": [[2, 0]], "residues": [1], "constant": 0.5}},
    }
    config = load_run_config(settings, "iterate")
    assert config.function.coeffs[0] == pytest.approx(1.5)
    assert config.parameters["iterations"] == 16


def test_explicit_lacunary_section():
    settings = {"blaschke": Z2, "lacunary": {"exponents": [1, 3], "components": [[1, 1], [1, -1]]}}
    config = load_run_config(settings, "lacunary-check")
    assert config.spec.exponents == (1, 3)
    assert config.spec.product is config.product
    assert config.fixture is None


def test_lacunary_fixture_brings_product_and_policy():
    config = load_run_config({"lacunary": {"fixture": "degree3_cyclic"}}, "cyclicity")
    assert config.fixture == "degree3_cyclic"
    assert config.product.degree == 3
    assert config.policy.truncation_degree == 512
    assert config.parameters["witness_mode"] == "greedy"


def test_policy_precedence():
    settings = {"lacunary": {"fixture": "degree3_cyclic"}, "policy": {"N": 256}}
    config = load_run_config(settings, "cyclicity", ["tau_rank=1e-9"])
    # The fixture sets M = 2048, the section N = 256 and the assignment tau_rank
    assert config.policy.grid_size == 2048
    assert config.policy.truncation_degree == 256
    assert config.policy.rank_tolerance == 1e-9


def test_overrides_from_the_command_line(tmp_path):
    settings = {"seed": 3, "output": {"directory": "reports"}, "parameters": {"battery_size": 4}}
    config = load_run_config(settings, "invariant-suite", seed=11, output_directory=tmp_path)
    assert config.seed == 11
    assert config.output_directory == tmp_path
    assert config.parameters == {"battery_size": 4}


@pytest.mark.parametrize(
    "settings, subcommand",
    [
        # Unknown section
        ({"blaschke": Z2, "function": {"coeffs": [1]}, "plots": {}}, "decompose"),
        # Two sources
        ({"blaschke": Z2, "function": {"coeffs": [1]}, "lacunary": {"fixture": "finite_z2"}}, "decompose"),
        # No source
        ({"blaschke": Z2}, "decompose"),
        # Function given where only a lacunary spec is read
        ({"blaschke": Z2, "function": {"coeffs": [1]}}, "cyclicity"),
        # Product given to a subcommand without input
        ({"blaschke": Z2}, "kernel-growth"),
        # A fixture brings its own product
        ({"blaschke": Z2, "lacunary": {"fixture": "finite_z2"}}, "cyclicity"),
        # An explicit spec needs one
        ({"lacunary": {"exponents": [1], "components": [[1, 0]]}}, "cyclicity"),
        ({"lacunary": {"fixture": "no_such_fixture"}}, "cyclicity"),
        ({"parameters": {"depth": 3}}, "kernel-growth"),
        ({"seed": -1}, "invariant-suite"),
        ({"policy": {"M": 100}}, "kernel-growth"),
        ({"policy": [1, 2]}, "kernel-growth"),
        ({"blaschke": Z2, "function": {"coeffs": [1], "rational": {}}}, "decompose"),
        ({}, "plot"),
    ],
)
def test_invalid_configurations(settings, subcommand):
    with pytest.raises(ValueError):
        load_run_config(settings, subcommand)


def test_read_config_file(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"seed": 5}), encoding="utf-8")
    assert read_config_file(path) == {"seed": 5}
    assert load_run_config(path, "invariant-suite").seed == 5
    assert read_config_file(None) == {}

    path.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ValueError):
        read_config_file(path)

    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ValueError):
        read_config_file(path)

    with pytest.raises(OSError):
        read_config_file(tmp_path / "missing.json")


BUNDLED = {
    "cyclicity_alternating.json": "cyclicity",
    "cyclicity_collinear.json": "cyclicity",
    "cyclicity_two_component.json": "cyclicity",
    "decompose_z2.json": "decompose",
    "invariant_suite.json": "invariant-suite",
    "invariant_suite_aliased.json": "invariant-suite",
    "iterate_rational.json": "iterate",
    "kernel_growth.json": "kernel-growth",
    "lacunary_check_b2.json": "lacunary-check",
}


def test_every_bundled_configuration_is_listed():
    assert sorted(p.name for p in CyclicityPaths.fixtures.glob("*.json")) == sorted(BUNDLED)


@pytest.mark.parametrize("name, subcommand", sorted(BUNDLED.items()))
def test_bundled_configurations_load(name, subcommand):
    config = load_run_config(CyclicityPaths.fixtures / name, subcommand)
    assert config.subcommand == subcommand
