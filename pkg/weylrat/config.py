import os
from enum import Enum
from typing import Annotated, Any, Dict, Optional

import toml
from annotated_types import Ge
from pydantic import BaseModel, Field, field_validator, model_validator
from rich import box
from rich.console import Console, Group
from rich.panel import Panel
from rich.table import Table
from rich.tree import Tree
from typing_extensions import Self

from weylrat.fmt import ifmt

error_console = Console(stderr=True, style="bold red")

# Beyond this rank the group no longer fits a desk-scale enumeration
MAX_VERIFY_RANK = 9


def default_workers() -> int:
    return os.cpu_count() or 1


def check_family_rank(rank: int) -> int:
    if rank < 5 or rank % 2 == 0:
        raise ValueError(
            f"rank {rank} is not supported: results hold for r >= 5 odd"
        )
    return rank


class OutputFormat(str, Enum):
    JSON = "json"
    DOT = "dot"
    TEXT = "text"


class DisplayMixin:
    def add_to_table(self, table: Table, section: str = "") -> None:
        raise NotImplementedError


class VerifyConfig(BaseModel, DisplayMixin):
    rank: int = Field(default=5)
    workers: int = Field(default_factory=default_workers, ge=1)
    extended: bool = Field(default=False)
    progress: bool = Field(default=False)
    progress_interval: int = Field(default=1 << 20, ge=1)
    chunks_per_worker: int = Field(default=8, ge=1)

    @field_validator("rank")
    @classmethod
    def check_rank(cls, rank: int) -> int:
        return check_family_rank(rank)

    @model_validator(mode="after")
    def check_extended(self) -> Self:
        if self.rank > MAX_VERIFY_RANK:
            raise ValueError(
                f"verification at r={self.rank} is out of desk scale "
                f"(largest supported rank is {MAX_VERIFY_RANK})"
            )
        if self.rank == MAX_VERIFY_RANK and not self.extended:
            raise ValueError(
                f"verification at r={self.rank} is opt-in, set extended = true"
            )
        return self

    def add_to_table(self, table: Table, section: str = "") -> None:
        table.add_row("[spring_green1]Verification")
        table.add_row("", "Rank", "=", f"{self.rank}")
        table.add_row("", "Workers", "=", ifmt(self.workers))
        table.add_row("", "Extended run", "=", f"{self.extended}")
        table.add_row("", "Progress bar", "=", f"{self.progress}")
        table.add_row("", "Log interval", "=", ifmt(self.progress_interval))
        table.add_row("", "Chunks per worker", "=", f"{self.chunks_per_worker}")


class OutputConfig(BaseModel, DisplayMixin):
    format: OutputFormat = Field(default=OutputFormat.JSON)
    output: Optional[str] = None

    def add_to_table(self, table: Table, section: str = "") -> None:
        table.add_section()
        table.add_row("[spring_green1]Output")
        table.add_row("", "Format", "=", self.format.value)
        table.add_row("", "Destination", "=", self.output or "stdout")


class Config(BaseModel, DisplayMixin):
    verify: VerifyConfig = Field(default_factory=VerifyConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)

    def display(self, config_path: Optional[str]) -> None:
        console = Console(stderr=True)
        config_table = Table(box=box.SIMPLE_HEAVY)
        config_table.add_column("Section")
        config_table.add_column("Setting")
        config_table.add_column("")
        config_table.add_column("Value")

        self.verify.add_to_table(config_table)
        self.output.add_to_table(config_table)

        tree = Tree(":control_knobs:")
        source = config_path or "built-in defaults"
        tree.add(Group(f":file_cabinet: Loaded from {source}", config_table))
        console.print(Panel(tree, title="Config"))


class CliConfig(BaseModel):
    rank: int
    workers: Annotated[int, Ge(1)] = Field(default_factory=default_workers)
    format: OutputFormat = OutputFormat.JSON
    output: Optional[str] = None

    @field_validator("rank")
    @classmethod
    def check_rank(cls, rank: int) -> int:
        return check_family_rank(rank)


def normalize_config(config: Dict[str, Dict[str, Any]]) -> Dict[str, Dict[str, Any]]:
    # Do any pre-processing necessary to the config here, such as handling
    # defaults and shorthand values, before pydantic validation.
    verify = config.setdefault("verify", {})
    output = config.setdefault("output", {})

    if verify.get("workers") == 0:
        # 0 is shorthand for every available core
        verify["workers"] = default_workers()

    rank = verify.get("rank")
    if isinstance(rank, int) and rank > MAX_VERIFY_RANK:
        raise RuntimeError(
            f"ERROR: verify.rank = {rank} is out of desk scale, "
            f"use a rank of at most {MAX_VERIFY_RANK}."
        )
    if rank == MAX_VERIFY_RANK and not verify.get("extended", False):
        raise RuntimeError(
            f"ERROR: verify.rank = {rank} is an extended run, "
            "set verify.extended = true to opt in."
        )

    if "format" in output and isinstance(output["format"], str):
        if output["format"] != output["format"].lower():
            error_console.print(
                "WARNING: output.format is case sensitive, "
                f"using `{output['format'].lower()}`.",
            )
        output["format"] = output["format"].lower()

    return config


def load_config(config_path: Optional[str]) -> Config:
    if config_path is None:
        return Config()
    with open(config_path, "r", encoding="utf8") as file:
        config = toml.load(file)
    return Config(**normalize_config(config))
