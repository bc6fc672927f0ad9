"""
Run and grid configuration, parsed from JSON documents.

Every section rejects keys it does not know. Relative paths resolve against
the directory of the config file they came from.

A run config looks like::

    {
      "dataset": "tweets.jsonl",
      "word_vectors": "alc.vec",
      "resources": {"stopwords": "stop.txt", "insult": "insult.txt"},
      "prep_level": "L3",
      "features": {"enabled": true, "families": ["text", "user"]},
      "split": {"ratio": 0.85, "seed": 13},
      "method": {"axis": {"t": 0.0}},
      "mode": "cascade",
      "stage_a": {"kind": "rf", "hyperparams": {"n_trees": 50}},
      "stage_b": {"kind": "rf"},
      "resample": {"strategy": "none"},
      "output_dir": "out"
    }
"""

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

from axiscascade.clustering import ClusterMethod
from axiscascade.core.errors import CascadeError, ConfigError, ValidationError
from axiscascade.models import ModelSpec, filter_hyperparams, get_kind_names
from axiscascade.resample import ResampleConfig
from axiscascade.splitcraft import ThresholdConfig
from axiscascade.text.features import FeatureConfig
from axiscascade.text.prep import PrepLevel

__all__ = [
    "GridSpec",
    "Method",
    "RunConfig",
    "SELECTION_METRICS",
    "load_grid_spec",
    "load_run_config",
    "method_from_dict",
    "method_to_dict",
]

SELECTION_METRICS = ("f1_macro", "f1_weighted")
EXECUTORS = ("inline", "nocatch", "thread", "cpprocess")
RESOURCE_KEYS = ("stopwords", "emoji_map", "insult", "person", "org")
MODES = ("cascade", "single")

Method = Union[ThresholdConfig, ClusterMethod]


def _check_keys(section: str, raw: Any, allowed) -> Mapping[str, Any]:
    if not isinstance(raw, Mapping):
        raise ConfigError(f"config section {section!r} must be an object, got {raw!r}")
    unknown = sorted(set(raw) - set(allowed))
    if unknown:
        raise ConfigError(
            f"Unknown keys in config section {section!r}:\n"
            f"    unknown: {unknown}\n"
            f"    allowed: {sorted(allowed)}"
        )
    return raw


def _resolve(path: Optional[str], base_dir: Path, must_exist: bool = True):
    if path is None:
        return None
    resolved = (base_dir / Path(path)).resolve()
    if must_exist and not resolved.exists():
        raise ConfigError(f"referenced file does not exist: {str(resolved)!r}")
    return resolved


def _path_or_none(path: Optional[Path]) -> Optional[str]:
    return None if path is None else str(path)


def _wrap(section: str, func, *args, **kwargs):
    """Re-raises library validation errors as config errors."""
    try:
        return func(*args, **kwargs)
    except ConfigError:
        raise
    except (ValidationError, TypeError) as exc:
        raise ConfigError(f"bad {section!r} config: {exc}") from exc


def method_from_dict(raw: Mapping[str, Any]) -> Method:
    """
    >>> method_from_dict({"axis": {"t": 0.03}}).tag
    'axis(t=0.03)'
    >>> method_from_dict({"axis": {"t": 0}, "cluster": {"name": "kmeans"}})
    Traceback (most recent call last):
    ...
    axiscascade.core.errors.ConfigError: exactly one of 'axis' or 'cluster' ...
    """
    _check_keys("method", raw, ("axis", "cluster"))
    if len(raw) != 1:
        raise ConfigError(
            f"exactly one of 'axis' or 'cluster' must be configured, got {sorted(raw)}"
        )
    if "axis" in raw:
        axis = _check_keys("method.axis", raw["axis"], ("t",))
        return _wrap("method.axis", ThresholdConfig, axis.get("t", 0.0))
    return _wrap("method.cluster", ClusterMethod.from_dict, dict(raw["cluster"]))


def method_to_dict(method: Method) -> Dict[str, Any]:
    if isinstance(method, ThresholdConfig):
        return {"axis": {"t": method.t}}
    return {"cluster": method.as_dict()}


_RUN_KEYS = (
    "dataset",
    "word_vectors",
    "resources",
    "prep_level",
    "drop_short_documents",
    "features",
    "use_embedding",
    "split",
    "method",
    "mode",
    "stage_a",
    "stage_b",
    "resample",
    "output_dir",
)
_FEATURE_KEYS = (
    "enabled",
    "families",
    "k_per_class",
    "election_date",
    "window_days",
    "window_count",
    "tz_offset_hours",
)


@dataclass(frozen=True)
class RunConfig:
    """
    One end-to-end run. ``features`` is `None` when engineered features are
    disabled; ``stage_b`` is `None` in single-stage mode.
    """

    dataset: Path
    method: Method
    stage_a: ModelSpec
    stage_b: Optional[ModelSpec] = None
    mode: str = "cascade"
    word_vectors: Optional[Path] = None
    resources: Mapping[str, Path] = field(default_factory=dict)
    prep_level: PrepLevel = PrepLevel.L3
    drop_short_documents: bool = False
    features: Optional[FeatureConfig] = None
    use_embedding: bool = True
    split_ratio: float = 0.85
    split_seed: int = 13
    resample: ResampleConfig = field(default_factory=ResampleConfig)
    output_dir: Path = Path("out")

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "cascade" and self.stage_b is None:
            raise ConfigError("cascade mode needs a 'stage_b' model")
        if self.features is None and not self.use_embedding:
            raise ConfigError("enable the embedding, engineered features, or both")
        if not 0 < self.split_ratio < 1:
            raise ConfigError(
                f"split ratio must be in (0, 1) so the run has test records to "
                f"evaluate, got {self.split_ratio}"
            )
        if not isinstance(self.split_seed, int) or self.split_seed < 0:
            raise ConfigError(f"split seed must be an integer >= 0: {self.split_seed}")

    @classmethod
    def from_dict(
        cls, raw: Mapping[str, Any], base_dir: Union[str, Path] = "."
    ) -> "RunConfig":
        base_dir = Path(base_dir)
        raw = _check_keys("run", raw, _RUN_KEYS)
        for key in ("dataset", "method", "stage_a"):
            if key not in raw:
                raise ConfigError(f"run config is missing {key!r}")
        resources = _check_keys("resources", raw.get("resources", {}), RESOURCE_KEYS)
        features_raw = _check_keys("features", raw.get("features", {}), _FEATURE_KEYS)
        features = None
        if features_raw.get("enabled", True):
            options = {k: v for k, v in features_raw.items() if k != "enabled"}
            if "families" in options:
                options["families"] = tuple(options["families"])
            features = _wrap("features", FeatureConfig, **options)
        split = _check_keys("split", raw.get("split", {}), ("ratio", "seed"))
        resample = _check_keys(
            "resample",
            raw.get("resample", {}),
            ("strategy", "k_neighbors", "ratio", "apply_to", "seed", "fixpoint"),
        )
        stage_b = raw.get("stage_b")
        if stage_b is not None:
            stage_b = _wrap("stage_b", ModelSpec.from_dict, stage_b)
        output_dir = raw.get("output_dir", "out")
        return cls(
            dataset=_resolve(raw["dataset"], base_dir),
            method=method_from_dict(raw["method"]),
            stage_a=_wrap("stage_a", ModelSpec.from_dict, raw["stage_a"]),
            stage_b=stage_b,
            mode=raw.get("mode", "cascade"),
            word_vectors=_resolve(raw.get("word_vectors"), base_dir),
            resources={k: _resolve(v, base_dir) for k, v in sorted(resources.items())},
            prep_level=_wrap("prep_level", PrepLevel.get, raw.get("prep_level", "L3")),
            drop_short_documents=bool(raw.get("drop_short_documents", False)),
            features=features,
            use_embedding=bool(raw.get("use_embedding", True)),
            split_ratio=split.get("ratio", 0.85),
            split_seed=split.get("seed", 13),
            resample=_wrap("resample", ResampleConfig, **resample),
            output_dir=_resolve(output_dir, base_dir, must_exist=False),
        )

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        """A JSON-ready snapshot; `.from_dict` of it rebuilds this config."""
        features: Dict[str, Any] = {"enabled": self.features is not None}
        if self.features is not None:
            features.update(
                families=list(self.features.families),
                k_per_class=self.features.k_per_class,
                election_date=self.features.election_date,
                window_days=self.features.window_days,
                window_count=self.features.window_count,
                tz_offset_hours=self.features.tz_offset_hours,
            )
        return {
            "dataset": str(self.dataset),
            "word_vectors": _path_or_none(self.word_vectors),
            "resources": {k: str(v) for k, v in sorted(self.resources.items())},
            "prep_level": self.prep_level.name,
            "drop_short_documents": self.drop_short_documents,
            "features": features,
            "use_embedding": self.use_embedding,
            "split": {"ratio": self.split_ratio, "seed": self.split_seed},
            "method": method_to_dict(self.method),
            "mode": self.mode,
            "stage_a": self.stage_a.as_dict(),
            "stage_b": None if self.stage_b is None else self.stage_b.as_dict(),
            "resample": self.resample.as_dict(),
            "output_dir": str(self.output_dir),
        }


def _read_json(path: Union[str, Path]) -> Any:
    try:
        with open(path, encoding="utf-8") as fobj:
            return json.load(fobj)
    except OSError as exc:
        raise ConfigError(f"cannot read config {str(path)!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {str(path)!r} is not valid JSON: {exc}") from exc


def load_run_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    raw = _read_json(path)
    return RunConfig.from_dict(raw, path.parent)


_GRID_KEYS = (
    "thresholds",
    "cluster_methods",
    "stage_a_kinds",
    "stage_b_kinds",
    "hyperparams",
    "include_single_stage",
    "selection_metric",
    "executor",
    "max_workers",
)


@dataclass(frozen=True)
class GridSpec:
    """
    The combinations a grid search tries. ``hyperparams`` is one map shared by
    every kind; each kind keeps the entries it accepts.
    """

    thresholds: Tuple[float, ...] = ()
    cluster_methods: Tuple[ClusterMethod, ...] = ()
    stage_a_kinds: Tuple[str, ...] = ("rf",)
    stage_b_kinds: Tuple[str, ...] = ("rf",)
    hyperparams: Mapping[str, Any] = field(default_factory=dict)
    include_single_stage: bool = True
    selection_metric: str = "f1_macro"
    executor: Optional[str] = None
    max_workers: Optional[int] = 0

    def __post_init__(self):
        if not self.thresholds and not self.cluster_methods:
            raise ConfigError("a grid needs at least one threshold or cluster method")
        if not self.stage_a_kinds or not self.stage_b_kinds:
            raise ConfigError("a grid needs non-empty stage_a_kinds and stage_b_kinds")
        for kind in self.stage_a_kinds + self.stage_b_kinds:
            if kind not in get_kind_names():
                raise ConfigError(f"unknown model kind in grid: {kind!r}")
            _wrap("hyperparams", filter_hyperparams, kind, self.hyperparams)
        if self.selection_metric not in SELECTION_METRICS:
            raise ConfigError(
                f"selection_metric must be one of {SELECTION_METRICS}, "
                f"got {self.selection_metric!r}"
            )
        if self.executor is not None and self.executor not in EXECUTORS:
            raise ConfigError(
                f"executor must be one of {EXECUTORS}, got {self.executor!r}"
            )
        for t in self.thresholds:
            _wrap("thresholds", ThresholdConfig, t)

    @property
    def methods(self) -> Tuple[Method, ...]:
        return tuple(ThresholdConfig(t) for t in self.thresholds) + self.cluster_methods

    @property
    def single_kinds(self) -> Tuple[str, ...]:
        return tuple(sorted(set(self.stage_a_kinds) | set(self.stage_b_kinds)))

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "GridSpec":
        raw = _check_keys("grid", raw, _GRID_KEYS)
        try:
            return cls(
                thresholds=tuple(raw.get("thresholds", ())),
                cluster_methods=tuple(
                    _wrap("cluster_methods", ClusterMethod.from_dict, dict(m))
                    for m in raw.get("cluster_methods", ())
                ),
                stage_a_kinds=tuple(raw.get("stage_a_kinds", ("rf",))),
                stage_b_kinds=tuple(raw.get("stage_b_kinds", ("rf",))),
                hyperparams=dict(raw.get("hyperparams", {})),
                include_single_stage=bool(raw.get("include_single_stage", True)),
                selection_metric=raw.get("selection_metric", "f1_macro"),
                executor=raw.get("executor"),
                max_workers=raw.get("max_workers", 0),
            )
        except CascadeError:
            raise
        except TypeError as exc:
            raise ConfigError(f"bad grid config: {exc}") from exc


def load_grid_spec(path: Union[str, Path]) -> GridSpec:
    return GridSpec.from_dict(_read_json(path))
