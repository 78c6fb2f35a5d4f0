"""Application configuration and packaged fixture access."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Mapping

from .prompts import DEFAULT_PROMPTS
from .topsis import DEFAULT_CRITERIA, CriterionSpec, Kind

WEIGHT_SOURCE_ENGINE = "topsis_engine"
WEIGHT_SOURCE_FILE = "external_file"


def data_path(name: str) -> Path:
    """Filesystem path of a packaged fixture file."""
    return Path(str(resources.files("resplan.data").joinpath(name)))


def packaged_data_dir() -> Path:
    """Filesystem path of the packaged fixture directory."""
    return Path(str(resources.files("resplan.data")))


@dataclass(frozen=True)
class AppConfig:
    # Weight source: engine-derived from the catalog, or an external file.
    weight_source: str = WEIGHT_SOURCE_ENGINE
    weights_file: Path | None = None
    catalog_path: Path | None = None
    criteria: tuple[CriterionSpec, ...] = DEFAULT_CRITERIA
    backends: tuple[Mapping, ...] = (
        {"kind": "mock", "id": "mock"},
    )
    default_backend: str = "mock"
    fusion_m: int = 3
    retry_budget: int = 3
    chunk_limit: int = 6000
    data_dir: Path = field(default_factory=lambda: Path("resplan-data"))
    accidents_path: Path | None = None   # None -> packaged fixture subset
    guidelines_path: Path | None = None  # None -> packaged fixture table
    prompts: Mapping[str, str] = field(default_factory=lambda: dict(DEFAULT_PROMPTS))

    def __post_init__(self):
        if self.weight_source not in (WEIGHT_SOURCE_ENGINE, WEIGHT_SOURCE_FILE):
            raise ValueError(f"unknown weight source {self.weight_source!r}")
        if self.weight_source == WEIGHT_SOURCE_FILE and self.weights_file is None:
            raise ValueError("weight source 'external_file' requires weights_file")
        if self.weight_source == WEIGHT_SOURCE_ENGINE and self.weights_file is not None:
            raise ValueError("weights_file is only valid with weight source 'external_file'")
        if self.fusion_m < 1:
            raise ValueError("fusion_m must be >= 1")
        if self.retry_budget < 0:
            raise ValueError("retry_budget must be >= 0")


def load_config(path: str | Path | None = None) -> AppConfig:
    """Build the config from a JSON file plus environment overrides.

    RESPLAN_DATA_DIR overrides the job/data directory; RESPLAN_CONFIG names
    a config file when no explicit path is given.
    """
    if path is None:
        env = os.environ.get("RESPLAN_CONFIG")
        path = Path(env) if env else None
    config = AppConfig()
    if path is not None:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        base = Path(path).parent

        def resolve(key):
            value = raw.get(key)
            if value is None:
                return None
            p = Path(value)
            return p if p.is_absolute() else base / p

        criteria = tuple(
            CriterionSpec(c["name"], float(c["weight"]), Kind(c.get("kind", "Benefit")))
            for c in raw.get("criteria", [])
        ) or DEFAULT_CRITERIA
        prompts = dict(DEFAULT_PROMPTS)
        prompts.update(raw.get("prompts", {}))
        config = AppConfig(
            weight_source=raw.get("weight_source", WEIGHT_SOURCE_ENGINE),
            weights_file=resolve("weights_file"),
            catalog_path=resolve("catalog"),
            criteria=criteria,
            backends=tuple(raw.get("backends", [{"kind": "mock", "id": "mock"}])),
            default_backend=raw.get("default_backend", "mock"),
            fusion_m=int(raw.get("fusion_m", 3)),
            retry_budget=int(raw.get("retry_budget", 3)),
            chunk_limit=int(raw.get("chunk_limit", 6000)),
            data_dir=resolve("data_dir") or Path("resplan-data"),
            accidents_path=resolve("accidents"),
            guidelines_path=resolve("guidelines"),
            prompts=prompts,
        )
    env_data_dir = os.environ.get("RESPLAN_DATA_DIR")
    if env_data_dir:
        config = replace(config, data_dir=Path(env_data_dir))
    return config
