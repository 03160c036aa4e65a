"""Tennis swing kinematics, 12-dimensional swing features and RBF classification."""

import json

from . import _core
from ._core import (
    FEATURE_COUNT,
    DegenerateFitError,
    DegenerateGeometryError,
    InvalidArgument,
    IoError,
    MissingSampleError,
    ParseError,
    SwingidError,
    TrainingRefused,
    accuracy,
    assemble_features,
    circumcenter,
    convert_handedness,
    extract,
    feature_names,
    format_percent,
    gradient_flow,
    load_features,
    load_labels,
    parse_clip,
    poly_fit2,
    random_swing,
    reduction,
    run_cli,
    sweet_spot,
    synth_dataset,
    vector_tips,
)

__all__ = [
    "FEATURE_COUNT",
    "DegenerateFitError",
    "DegenerateGeometryError",
    "InvalidArgument",
    "IoError",
    "MissingSampleError",
    "Model",
    "ParseError",
    "SwingidError",
    "TrainingRefused",
    "accuracy",
    "assemble_features",
    "circumcenter",
    "convert_handedness",
    "extract",
    "feature_names",
    "format_percent",
    "gradient_flow",
    "load_features",
    "load_labels",
    "loocv",
    "parse_clip",
    "poly_fit2",
    "random_swing",
    "reduction",
    "run_cli",
    "sweet_spot",
    "synth_dataset",
    "train",
    "vector_tips",
    "viewer_bundle",
]


class Model:
    """Trained RBF network held as its JSON document."""

    def __init__(self, text):
        self._text = text
        self.doc = json.loads(text)

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as f:
            return cls(f.read())

    @property
    def hidden_units(self):
        return len(self.doc["centers"])

    def scores(self, x):
        return _core.predict(self._text, x)

    def classify(self, x):
        """'bad' where the score reaches 0.5, else 'good'."""
        return ["bad" if s >= 0.5 else "good" for s in self.scores(x)]

    def to_json(self):
        return self._text


def train(x, y, **config):
    """Labels may be 'good'/'bad' strings or truthy values with bad = 1."""
    return Model(_core.train(x, y, **config))


def loocv(x, y, ids=(), **config):
    return json.loads(_core.loocv(x, y, list(ids), **config))


def viewer_bundle(clip_path, start, end, labels_path=None):
    return json.loads(_core.viewer_bundle(str(clip_path), start, end,
                                          None if labels_path is None else str(labels_path)))
