"""Project configuration: one JSON file pinning every knob that affects
pipeline output, so a config hash plus a store fully determines results."""

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .classifiers import SvmHyper
from .corpus import DEFAULT_ABBREVIATIONS, ProjectStore, SegmentationConfig
from .errors import DataError
from .pipeline import PipelineConfig
from .scoring import QinUWeights
from .similarity import SentenceSimParams

CONFIG_FILENAME = "config.json"

_KNOWN_KEYS = {
    "pipeline",
    "segmentation",
    "similarity",
    "nb_smoothing",
    "svm",
    "lsa_rank",
    "weights",
    "seed",
    "taxonomy_path",
}


@dataclass(frozen=True)
class ProjectConfig:
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    segmentation: SegmentationConfig = field(default_factory=SegmentationConfig)
    similarity: SentenceSimParams = field(default_factory=SentenceSimParams)
    nb_smoothing: float = 1.0
    svm: SvmHyper = field(default_factory=SvmHyper)
    lsa_rank: int | None = None
    weights: QinUWeights = field(default_factory=QinUWeights)
    seed: int = 0
    taxonomy_path: str | None = None

    def to_json(self) -> dict:
        return {
            "pipeline": self.pipeline.to_json(),
            "segmentation": {
                "abbreviations": sorted(self.segmentation.abbreviations),
                "max_tokens": self.segmentation.max_tokens,
            },
            "similarity": self.similarity.to_json(),
            "nb_smoothing": self.nb_smoothing,
            "svm": {"lambda": self.svm.lam, "epochs": self.svm.epochs, "seed": self.svm.seed},
            "lsa_rank": self.lsa_rank,
            "weights": self.weights.to_json(),
            "seed": self.seed,
            "taxonomy_path": self.taxonomy_path,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ProjectConfig":
        unknown = set(obj) - _KNOWN_KEYS
        if unknown:
            raise DataError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        try:
            seg = obj.get("segmentation", {})
            svm = obj.get("svm", {})
            w = obj.get("weights", {})
            return cls(
                pipeline=PipelineConfig.from_json(obj.get("pipeline", {})),
                segmentation=SegmentationConfig(
                    abbreviations=frozenset(seg.get("abbreviations", DEFAULT_ABBREVIATIONS)),
                    max_tokens=int(seg.get("max_tokens", 60)),
                ),
                similarity=SentenceSimParams.from_json(obj.get("similarity", {})),
                nb_smoothing=float(obj.get("nb_smoothing", 1.0)),
                svm=SvmHyper(
                    lam=float(svm.get("lambda", 1e-3)),
                    epochs=int(svm.get("epochs", 50)),
                    seed=int(svm.get("seed", 0)),
                ),
                lsa_rank=None if obj.get("lsa_rank") is None else int(obj["lsa_rank"]),
                weights=QinUWeights(
                    w_effectiveness=float(w.get("effectiveness", 1.0 / 3.0)),
                    w_efficiency=float(w.get("efficiency", 1.0 / 3.0)),
                    w_risk=float(w.get("freedom_from_risk", 1.0 / 3.0)),
                ),
                seed=int(obj.get("seed", 0)),
                taxonomy_path=obj.get("taxonomy_path"),
            )
        except (TypeError, ValueError) as e:
            raise DataError(f"invalid config: {e}") from e

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]

    def save(self, root: str | Path) -> Path:
        path = Path(root) / CONFIG_FILENAME
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(
            json.dumps(self.to_json(), ensure_ascii=False, indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        return path

    @classmethod
    def load(cls, root: str | Path) -> "ProjectConfig":
        path = Path(root) / CONFIG_FILENAME
        if not path.exists():
            raise DataError(f"no project config at {path}; run 'init' first")
        try:
            obj = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise DataError(f"invalid JSON in {path}: {e}") from e
        return cls.from_json(obj)


def init_project(root: str | Path, config: ProjectConfig | None = None) -> "ProjectStore":
    """Create the project directory, write its config and empty record files."""
    root = Path(root)
    config = config or ProjectConfig()
    existing = root / CONFIG_FILENAME
    if existing.exists():
        raise DataError(f"project already initialized at {root}")
    config.save(root)
    store = ProjectStore(root, config.pipeline, config.segmentation)
    for path in (store.reviews_path, store.sentences_path, store.annotations_path):
        path.touch()
    return store


def open_project(root: str | Path) -> tuple["ProjectStore", ProjectConfig]:
    config = ProjectConfig.load(root)
    store = ProjectStore(root, config.pipeline, config.segmentation)
    return store, config
