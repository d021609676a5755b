"""Workload mix configuration: named presets or YAML files."""

from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

import yaml

from retrograph.workloads import validate_mix

PRESETS: dict[str, dict[str, float]] = {
    "incremental": {"insert": 0.5, "cancel": 0.1, "conn": 0.2, "sf": 0.1, "sfsize": 0.1},
    "full": {
        "insert": 0.35,
        "delete": 0.15,
        "cancel": 0.1,
        "conn": 0.1,
        "sfsize": 0.05,
        "msf": 0.05,
        "msfweight": 0.05,
        "maxdeg": 0.05,
        "matchsize": 0.05,
        "edges": 0.05,
    },
    "maxdeg": {"insert": 0.4, "delete": 0.2, "cancel": 0.1, "maxdeg": 0.3},
    "inserts": {"insert": 1.0},
}


@dataclass
class WorkloadConfig:
    """Parameters of a random workload."""

    mix: dict[str, float] = field(default_factory=lambda: dict(PRESETS["full"]))
    n: int = 30
    steps: int = 1000
    seed: int = 0
    max_weight: int = 1
    now_ratio: float = 0.1


class MixConfigParser:
    """Parse a workload YAML file.

    The file holds a ``mix:`` mapping of operation or query kind to ratio
    and optionally ``n``, ``steps``, ``seed``, ``max_weight`` and
    ``now_ratio``.
    """

    def __init__(self, config_path: Path):
        self.config_path = config_path

    def parse(self) -> WorkloadConfig:
        """Raises:
            FileNotFoundError: If the file doesn't exist
            ValueError: If the file is malformed
        """
        if not self.config_path.exists():
            raise FileNotFoundError(f"workload config not found at {self.config_path}")

        with open(self.config_path) as f:
            data = yaml.safe_load(f)

        if not isinstance(data, dict) or "mix" not in data:
            raise ValueError(f"{self.config_path} must contain a 'mix' section")
        if not isinstance(data["mix"], dict):
            raise ValueError("'mix' must map operation kinds to ratios")

        known = {f.name for f in fields(WorkloadConfig)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown workload key(s): {', '.join(sorted(unknown))}")

        config = WorkloadConfig(mix=validate_mix(data["mix"]))
        for name in ("n", "steps", "seed", "max_weight"):
            if name in data:
                setattr(config, name, _int_field(name, data[name]))
        if "now_ratio" in data:
            ratio = data["now_ratio"]
            if isinstance(ratio, bool) or not isinstance(ratio, (int, float)) or not 0 <= ratio <= 1:
                raise ValueError(f"'now_ratio' must be a number in [0, 1], got {ratio!r}")
            config.now_ratio = float(ratio)
        return config


def _int_field(name: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"'{name}' must be an integer, got {value!r}")
    return value


def load_workload(source: str) -> WorkloadConfig:
    """A preset by name, or a YAML file path."""
    if source in PRESETS:
        return WorkloadConfig(mix=dict(PRESETS[source]))
    return MixConfigParser(Path(source)).parse()
