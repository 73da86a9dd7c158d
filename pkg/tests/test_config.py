from pathlib import Path

import pytest
from polyfactory.factories.pydantic_factory import ModelFactory
from pydantic import ValidationError

from weylrat.config import (
    CliConfig,
    Config,
    OutputConfig,
    OutputFormat,
    VerifyConfig,
    default_workers,
    load_config,
    normalize_config,
)


class VerifyConfigFactory(ModelFactory[VerifyConfig]): ...


class OutputConfigFactory(ModelFactory[OutputConfig]): ...


class ConfigFactory(ModelFactory[Config]): ...


class CliConfigFactory(ModelFactory[CliConfig]): ...


def test_default_config() -> None:
    config = Config()
    assert config.verify.rank == 5
    assert config.verify.workers == default_workers()
    assert not config.verify.extended
    assert config.output.format is OutputFormat.JSON
    assert config.output.output is None


def test_verify_config_accepts_odd_ranks() -> None:
    for rank in (5, 7):
        assert VerifyConfigFactory.build(rank=rank, workers=2).rank == rank
    config = VerifyConfigFactory.build(rank=9, extended=True, workers=2)
    assert config.extended


@pytest.mark.parametrize("rank", [3, 4, 6, 8])
def test_verify_config_rejects_unsupported_ranks(rank: int) -> None:
    with pytest.raises(ValidationError, match="r >= 5 odd"):
        VerifyConfig(rank=rank)


def test_verify_config_rank_nine_is_opt_in() -> None:
    with pytest.raises(ValidationError, match="opt-in"):
        VerifyConfig(rank=9)
    with pytest.raises(ValidationError, match="desk scale"):
        VerifyConfig(rank=11, extended=True)


def test_verify_config_rejects_zero_workers() -> None:
    with pytest.raises(ValidationError):
        VerifyConfig(workers=0)


def test_config_display(capsys: pytest.CaptureFixture[str]) -> None:
    config = ConfigFactory.build(
        verify=VerifyConfigFactory.build(rank=7, workers=3, extended=False),
        output=OutputConfigFactory.build(format=OutputFormat.DOT, output=None),
    )
    config.display("weylrat.toml")
    err = capsys.readouterr().err
    assert "Config" in err
    assert "weylrat.toml" in err
    assert "Verification" in err
    assert "dot" in err


def test_cli_config() -> None:
    config = CliConfigFactory.build(rank=5, workers=1, format=OutputFormat.TEXT)
    assert config.format is OutputFormat.TEXT
    with pytest.raises(ValidationError, match="r >= 5 odd"):
        CliConfig(rank=6)
    with pytest.raises(ValidationError):
        CliConfig(rank=5, workers=0)


def test_normalize_config_expands_zero_workers() -> None:
    config = normalize_config({"verify": {"workers": 0}})
    assert config["verify"]["workers"] == default_workers()
    assert config["output"] == {}


def test_normalize_config_rejects_large_ranks() -> None:
    with pytest.raises(RuntimeError, match="desk scale"):
        normalize_config({"verify": {"rank": 11}})
    with pytest.raises(RuntimeError, match="extended"):
        normalize_config({"verify": {"rank": 9}})
    config = normalize_config({"verify": {"rank": 9, "extended": True}})
    assert config["verify"]["rank"] == 9


def test_normalize_config_lowercases_format(
    capsys: pytest.CaptureFixture[str],
) -> None:
    config = normalize_config({"output": {"format": "DOT"}})
    assert config["output"]["format"] == "dot"
    assert "WARNING" in capsys.readouterr().err


def test_load_config(tmp_path: Path) -> None:
    path = tmp_path / "weylrat.toml"
    path.write_text(
        "[verify]\nrank = 7\nworkers = 2\nprogress = true\n\n"
        '[output]\nformat = "text"\noutput = "report.txt"\n',
        encoding="utf8",
    )
    config = load_config(str(path))
    assert config.verify.rank == 7
    assert config.verify.workers == 2
    assert config.verify.progress
    assert config.output.format is OutputFormat.TEXT
    assert config.output.output == "report.txt"


def test_load_config_without_path() -> None:
    assert load_config(None) == Config()


def test_load_config_rejects_bad_values(tmp_path: Path) -> None:
    path = tmp_path / "weylrat.toml"
    path.write_text("[verify]\nrank = 6\n", encoding="utf8")
    with pytest.raises(ValidationError):
        load_config(str(path))
