"""
================================================================================
DESCRIPTIVE KEYPHRASES — Configuration Management
================================================================================
Centralized run configuration for every pipeline stage.
Precedence: dataclass defaults < environment (.env, KEYPHRASE_*) < JSON
run-config file < command-line overrides.
================================================================================
"""

import os
import json
from pathlib import Path
from typing import Optional, Dict, Any, List, Tuple
from dataclasses import dataclass, field, asdict, fields, replace
from dotenv import load_dotenv

from .errors import ConfigError
from .utils import stable_hash

# Load environment variables
load_dotenv()

ENV_PREFIX = "KEYPHRASE_"
SPLIT_MODES = ("in-sample", "holdout")

# Settings applied after featurization; changing them needs no new matrix
ANALYSIS_ONLY_FEATURES = ("commonness_bins", "histogram_bins", "commonness_cutoffs")


@dataclass
class PathsConfig:
    """Input and output locations"""
    foreground_dir: str = "fixtures/foreground"
    background_dir: str = "fixtures/background"
    annotations_dir: str = "fixtures/annotations"
    responses_file: str = "fixtures/responses.csv"
    blocklist_file: str = "data/spurious_phrases.txt"
    output_dir: str = "output"

    @property
    def output(self) -> Path:
        return Path(self.output_dir)

    @property
    def index_file(self) -> Path:
        return self.output / "index.json"

    @property
    def examples_file(self) -> Path:
        return self.output / "examples.jsonl"

    @property
    def features_file(self) -> Path:
        return self.output / "features.csv"

    @property
    def model_file(self) -> Path:
        return self.output / "model.json"


@dataclass
class CandidateConfig:
    """Response filtering and negative sampling"""
    max_phrase_words: int = 5
    n_max: int = 5
    negative_ratio: int = 10
    negative_weight: float = 0.1
    positive_weight: float = 1.0


@dataclass
class FeatureConfig:
    """Feature families and their parameters"""
    frequency: bool = True
    commonness: bool = True
    grammar_parse: bool = True
    grammar_pos: bool = True
    positional: bool = True
    commonness_bins: int = 0        # 0 = raw commonness value
    bm25_k1: float = 2.0
    bm25_b: float = 0.75
    smoothing_increment: float = 0.01
    histogram_bins: int = 20
    commonness_cutoffs: List[int] = field(default_factory=lambda: [0, 5, 10, 15, 20])


@dataclass
class TrainingConfig:
    """Logistic regression and evaluation split"""
    tolerance: float = 1e-8
    max_iterations: int = 100
    separation_cap: float = 100.0
    split_mode: str = "in-sample"
    eval_fraction: float = 0.25
    top_k: int = 10


@dataclass
class Config:
    """Master configuration class"""
    paths: PathsConfig = field(default_factory=PathsConfig)
    candidates: CandidateConfig = field(default_factory=CandidateConfig)
    features: FeatureConfig = field(default_factory=FeatureConfig)
    training: TrainingConfig = field(default_factory=TrainingConfig)

    seed: int = 13
    workers: int = 4
    debug: bool = False

    @classmethod
    def from_env(cls) -> "Config":
        """Load configuration from environment variables"""
        config = cls()
        for section in ("paths", "candidates", "features", "training"):
            current = getattr(config, section)
            updates = {}
            for f in fields(current):
                raw = os.getenv(f"{ENV_PREFIX}{f.name.upper()}")
                if raw is not None:
                    updates[f.name] = _coerce(raw, getattr(current, f.name), f.name)
            if updates:
                setattr(config, section, replace(current, **updates))

        config.seed = int(os.getenv(f"{ENV_PREFIX}SEED", str(config.seed)))
        config.workers = int(os.getenv(f"{ENV_PREFIX}WORKERS", str(config.workers)))
        config.debug = os.getenv(f"{ENV_PREFIX}DEBUG", "false").lower() == "true"
        return config

    @classmethod
    def from_file(cls, path: str | Path, base: Optional["Config"] = None) -> "Config":
        """Layer a JSON run-config file over base (environment by default)"""
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"Cannot read run config {path}: {e}")
        if not isinstance(data, dict):
            raise ConfigError(f"Run config {path} must be a JSON object")
        return (base or cls.from_env()).with_overrides(data)

    def with_overrides(self, data: Dict[str, Any]) -> "Config":
        """Return a copy with nested section values replaced"""
        config = replace(self)
        for key, value in data.items():
            if key in ("paths", "candidates", "features", "training"):
                if not isinstance(value, dict):
                    raise ConfigError(f"Section '{key}' must be an object")
                section = getattr(config, key)
                known = {f.name for f in fields(section)}
                unknown = sorted(set(value) - known)
                if unknown:
                    raise ConfigError(f"Unknown {key} setting(s): {', '.join(unknown)}")
                setattr(config, key, replace(section, **value))
            elif key in ("seed", "workers", "debug"):
                setattr(config, key, value)
            else:
                raise ConfigError(f"Unknown config key: {key}")
        return config

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def validate(self) -> List[str]:
        """Return a list of configuration problems (empty when valid)"""
        problems = []
        c, feat, tr = self.candidates, self.features, self.training

        if c.max_phrase_words < 1:
            problems.append("candidates.max_phrase_words must be >= 1")
        if not 1 <= c.n_max <= 5:
            problems.append("candidates.n_max must be in 1..5")
        if c.negative_ratio < 1:
            problems.append("candidates.negative_ratio must be >= 1")
        if c.negative_weight <= 0 or c.positive_weight <= 0:
            problems.append("sample weights must be positive")
        if feat.commonness_bins != 0 and not 2 <= feat.commonness_bins <= 20:
            problems.append("features.commonness_bins must be 0 or in 2..20")
        if feat.bm25_k1 <= 0:
            problems.append("features.bm25_k1 must be positive")
        if not 0 <= feat.bm25_b <= 1:
            problems.append("features.bm25_b must be in [0, 1]")
        if feat.smoothing_increment <= 0:
            problems.append("features.smoothing_increment must be positive")
        if feat.histogram_bins < 1:
            problems.append("features.histogram_bins must be >= 1")
        if any(cut < 0 for cut in feat.commonness_cutoffs):
            problems.append("features.commonness_cutoffs must be non-negative")
        if tr.split_mode not in SPLIT_MODES:
            problems.append(f"training.split_mode must be one of {', '.join(SPLIT_MODES)}")
        if not 0 < tr.eval_fraction < 1:
            problems.append("training.eval_fraction must be in (0, 1)")
        if tr.tolerance <= 0 or tr.max_iterations < 1 or tr.separation_cap <= 0:
            problems.append("training tolerance, max_iterations and separation_cap must be positive")
        if self.workers < 1:
            problems.append("workers must be >= 1")
        return problems

    def require_valid(self) -> "Config":
        problems = self.validate()
        if problems:
            raise ConfigError("Invalid configuration: " + "; ".join(problems))
        return self

    def index_hash(self) -> str:
        """Provenance hash for the background index"""
        return stable_hash({
            "background_dir": self.paths.background_dir,
            "n_max": self.candidates.n_max,
        })

    def featurize_hash(self) -> str:
        """Provenance hash for labeled examples and the feature matrix"""
        data = self.to_dict()
        features = {k: v for k, v in data["features"].items() if k not in ANALYSIS_ONLY_FEATURES}
        paths = {k: v for k, v in data["paths"].items() if k != "output_dir"}
        return stable_hash({
            "paths": paths,
            "candidates": data["candidates"],
            "features": features,
            "seed": self.seed,
        })


def _coerce(raw: str, current: Any, name: str) -> Any:
    """Convert an environment string to the type of the current value"""
    try:
        if isinstance(current, bool):
            return raw.strip().lower() in ("1", "true", "yes", "on")
        if isinstance(current, int):
            return int(raw)
        if isinstance(current, float):
            return float(raw)
        if isinstance(current, list):
            return [int(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"Invalid value for {ENV_PREFIX}{name.upper()}: {raw!r}")
    return raw


def parse_override(text: str) -> Tuple[str, Any]:
    """Parse a --set section.key=value flag into a nested override"""
    if "=" not in text:
        raise ConfigError(f"Override must look like section.key=value: {text!r}")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip(), value


def apply_overrides(config: Config, overrides: List[str]) -> Config:
    """Apply --set flags (highest precedence)"""
    nested: Dict[str, Any] = {}
    for text in overrides:
        key, value = parse_override(text)
        if "." in key:
            section, name = key.split(".", 1)
            nested.setdefault(section, {})[name] = value
        else:
            nested[key] = value
    return config.with_overrides(nested) if nested else config

