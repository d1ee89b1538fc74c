"""
Tests for the command line and run configuration
"""

import json
from pathlib import Path

import pytest
from joblib import parallel_backend
from typer.testing import CliRunner

from core.command_handler import EXIT_CODES, EXIT_ERROR
from core.config import RunConfig
from core.exceptions import ConfigError
from limitset.verdict import ALGEBRAIC_CONSISTENT, INCONCLUSIVE, NOT_ALGEBRAIC
from main import app

ROOT = Path(__file__).parent.parent

runner = CliRunner()


@pytest.fixture(autouse=True)
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def read_json(path: Path):
    return json.loads(path.read_text(encoding="utf-8"))


class TestConfig:
    @pytest.mark.parametrize("name", ["config.json", "config_template.json"])
    def test_shipped_files_validate(self, name):
        config = RunConfig(str(ROOT / "config" / name)).validate()
        assert isinstance(config.seed, int)

    def test_partial_section_keeps_defaults(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"shells": {"points": 100}}), encoding="utf-8")
        config = RunConfig(str(path))
        assert config.shells.points == 100
        assert config.shells.r_max == 60.0

    @pytest.mark.parametrize("data", [
        {"shells": {"bogus": 1}},
        {"nonsense": {}},
        {"shells": 3},
    ])
    def test_unknown_or_malformed_sections(self, tmp_path, data):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(data), encoding="utf-8")
        with pytest.raises(ConfigError):
            RunConfig(str(path))

    @pytest.mark.parametrize("section, key, value", [
        ("shells", "r_min", 100.0),
        ("shells", "shells", 1),
        ("tolerances", "eps_point", 0.0),
        ("render", "resolution", 8),
        ("render", "bbox", [0.0, 1.0, 0.0]),
        ("render", "formats", ["gif"]),
        ("variety", "mode", "cartesian"),
    ])
    def test_invalid_values(self, section, key, value):
        config = RunConfig(seed=1)
        config.override(section, key, value)
        with pytest.raises(ConfigError):
            config.validate()

    def test_seed_must_be_an_integer(self):
        config = RunConfig()
        config.seed = "7"
        with pytest.raises(ConfigError):
            config.validate()

    def test_seed_has_no_default(self):
        with pytest.raises(ConfigError, match="seed"):
            RunConfig().validate()

    @pytest.mark.parametrize("data", [
        {"shells": {"points": "3000"}},
        {"shells": {"r_max": "60"}},
        {"shells": {"shells": True}},
        {"render": {"bbox": [-1.0, 1.0, "a", 1.0]}},
        {"render": {"formats": "svg"}},
        {"variety": {"k": 1.5}},
        {"certify": {"slopes": [[1.0]]}},
    ])
    def test_wrong_field_types(self, tmp_path, data):
        path = tmp_path / "typed.json"
        path.write_text(json.dumps(dict(data, seed=1)), encoding="utf-8")
        config = RunConfig(str(path))
        with pytest.raises(ConfigError, match="wrong type"):
            config.validate()

    def test_integers_are_accepted_for_floats(self, tmp_path):
        path = tmp_path / "ints.json"
        path.write_text(json.dumps({"seed": 1, "shells": {"r_min": 10, "r_max": 40}}), encoding="utf-8")
        config = RunConfig(str(path)).validate()
        assert config.shells.r_max == 40

    def test_echo_leaves_out_the_worker_count(self, tmp_path):
        echoes = []
        for workers in (1, 8):
            config = RunConfig(seed=7)
            config.override("shells", "workers", workers)
            path = tmp_path / f"echo{workers}.json"
            config.save(str(path), echo=True)
            echoes.append(path.read_bytes())
        assert echoes[0] == echoes[1]
        assert "workers" not in json.loads(echoes[0])["shells"]

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            RunConfig(str(tmp_path / "absent.json"))

    def test_save_and_reload(self, tmp_path):
        config = RunConfig(seed=9)
        config.variety.expression = "z1*z2 - 1"
        config.save(str(tmp_path / "echo.json"))
        again = RunConfig(str(tmp_path / "echo.json"))
        assert again.seed == 9
        assert again.variety.expression == "z1*z2 - 1"

    def test_expression_from_file(self, tmp_path):
        (tmp_path / "curve.txt").write_text("1 + z1 + z2\n", encoding="utf-8")
        config = RunConfig()
        config.variety.file = str(tmp_path / "curve.txt")
        assert config.expression_text() == "1 + z1 + z2"


def test_exit_codes():
    assert EXIT_CODES == {ALGEBRAIC_CONSISTENT: 0, NOT_ALGEBRAIC: 10, INCONCLUSIVE: 20}


def test_classify_line(workdir):
    result = runner.invoke(app, ["classify", "--expr", "1+z1+z2", "--seed", "1", "--points", "1500",
                                 "--out", "out"])
    assert result.exit_code == 0
    verdict = read_json(workdir / "out" / "verdict.json")
    assert verdict["decision"] == ALGEBRAIC_CONSISTENT
    assert verdict["dim_estimate"] == 0
    assert read_json(workdir / "out" / "config.json")["seed"] == 1


def test_classify_exponential_curve(workdir):
    result = runner.invoke(app, ["classify", "--expr", "(t, exp(t))", "--mode", "parametrized", "--seed", "2",
                                 "--points", "1500", "--out", "out"])
    assert result.exit_code == 10
    assert read_json(workdir / "out" / "verdict.json")["decision"] == NOT_ALGEBRAIC


def test_limitset_writes_the_exact_complex(workdir):
    result = runner.invoke(app, ["limitset", "--expr", "z1*z2 - 1", "--seed", "3", "--points", "1000",
                                 "--out", "out"])
    assert result.exit_code == 0
    report = read_json(workdir / "out" / "limitset.json")
    assert len(report["oracle"]["cells"]) == 2
    assert len(report["estimate"]["cells"]) == 2


def test_certify_claimed_slopes(workdir):
    config = workdir / "certify.json"
    config.write_text(json.dumps({
        "seed": 1,
        "variety": {"expression": "exp(z1)"},
        "certify": {"slopes": [[1]], "degree": 4},
    }), encoding="utf-8")
    result = runner.invoke(app, ["certify", "--config", str(config), "--out", "out"])
    assert result.exit_code == 0
    certificate = read_json(workdir / "out" / "certificate.json")
    assert certificate["violation_count"] == 2
    assert certificate["compact"] is False


def test_unknown_identifier_is_an_error(workdir):
    result = runner.invoke(app, ["classify", "--expr", "1+z1+q", "--seed", "1", "--points", "100",
                                 "--out", "out"])
    assert result.exit_code == EXIT_ERROR


def test_bad_config_is_an_error(workdir):
    config = workdir / "bad.json"
    config.write_text(json.dumps({"shells": {"bogus": 1}}), encoding="utf-8")
    result = runner.invoke(app, ["classify", "--config", str(config)])
    assert result.exit_code == EXIT_ERROR


def test_missing_seed_is_an_error(workdir):
    result = runner.invoke(app, ["classify", "--expr", "1+z1+z2", "--points", "100", "--out", "out"])
    assert result.exit_code == EXIT_ERROR
    assert not (workdir / "out").exists()


def test_mistyped_config_value_is_an_error(workdir):
    config = workdir / "typed.json"
    config.write_text(json.dumps({"seed": 1, "shells": {"points": "3000"}}), encoding="utf-8")
    result = runner.invoke(app, ["classify", "--config", str(config)])
    assert result.exit_code == EXIT_ERROR


def test_worker_count_does_not_change_any_output_byte(workdir):
    outputs = {}
    for workers in ("1", "2"):
        with parallel_backend("threading"):
            result = runner.invoke(app, ["classify", "--expr", "1+z1+z2", "--seed", "6", "--points", "1500",
                                         "--workers", workers, "--out", f"out{workers}"])
        assert result.exit_code == 0
        root = workdir / f"out{workers}"
        outputs[workers] = {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}
    assert "config.json" in outputs["1"]
    assert outputs["1"] == outputs["2"]


def test_classify_one_sine_component(workdir):
    result = runner.invoke(app, ["classify", "--expr", "sin(pi*z1*z2)", "--component", "1", "--seed", "8",
                                 "--points", "1500", "--out", "out"])
    assert result.exit_code == 0
    verdict = read_json(workdir / "out" / "verdict.json")
    assert verdict["decision"] == ALGEBRAIC_CONSISTENT
    assert sorted(tuple(cell["slopes"][0]) for cell in verdict["cells"]) == [(-1, 1), (1, -1)]


def test_unknown_flag_is_a_usage_error():
    result = runner.invoke(app, ["classify", "--frobnicate"])
    assert result.exit_code == 2


def test_phase_of_a_binomial(workdir):
    result = runner.invoke(app, ["phase", "--expr", "z1*z2 - 1", "--seed", "4", "--points", "600", "--out", "out"])
    assert result.exit_code == 0
    report = read_json(workdir / "out" / "phase.json")
    assert report["points"] == 1800
    assert [circle["slope"] for circle in report["circles"]] == [[1, -1]]
    assert (workdir / "out" / "phases.txt").exists()


def test_render_writes_figures(workdir):
    config = workdir / "render.json"
    config.write_text(json.dumps({
        "seed": 5,
        "variety": {"expression": "1+z1+z2"},
        "shells": {"points": 200},
        "render": {"bbox": [-3.0, 3.0, -3.0, 3.0], "resolution": 64, "region_points": 5000,
                   "formats": ["svg", "ppm"], "area_radii": [1.0, 2.0, 3.0]},
    }), encoding="utf-8")
    result = runner.invoke(app, ["render", "--config", str(config), "--out", "out"])
    assert result.exit_code == 0
    out = workdir / "out"
    for name in ("amoeba.svg", "amoeba.ppm", "rho.svg", "rho.ppm", "figures.json", "area.json"):
        assert (out / name).exists()
    assert read_json(out / "figures.json")["resolution"] == 64
