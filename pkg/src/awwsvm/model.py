"""Linear decision hyperplane: predictions, margins, geometric distances.

Training uses bias augmentation: a constant feature 1 is appended to every
sample, so the bias is the last component of the augmented weight vector and
is regularized with it. Geometric distances divide by the norm of the
non-augmented part only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Sample


class DegenerateModelError(ValueError):
    """A zero weight vector defines no hyperplane; distances are undefined."""


@dataclass
class LinearModel:
    """Hyperplane {x : w.x + b = 0} with prediction sign(w.x + b)."""

    w: np.ndarray
    b: float
    label_map: dict[int, int] | None = None

    @property
    def dim(self) -> int:
        return len(self.w)

    @classmethod
    def from_augmented(cls, w_aug: np.ndarray, label_map: dict[int, int] | None = None) -> "LinearModel":
        w_aug = np.asarray(w_aug, dtype=np.float64)
        return cls(w=w_aug[:-1].copy(), b=float(w_aug[-1]), label_map=label_map)

    def augmented(self) -> np.ndarray:
        return np.concatenate([self.w, [self.b]])


def sparse_dot(features: tuple[tuple[int, float], ...], w: np.ndarray) -> float:
    """Dot product of a sparse sample with a dense vector.

    Indices beyond len(w) are ignored (features unseen at training time).
    """
    d = len(w)
    return float(sum(val * w[idx - 1] for idx, val in features if idx <= d))


def raw_score(m: LinearModel, x: Sample) -> float:
    return sparse_dot(x.features, m.w) + m.b


def decide(m: LinearModel, x: Sample) -> int:
    """Predicted label; a score of exactly 0 maps to +1."""
    return 1 if raw_score(m, x) >= 0.0 else -1


def signed_distance(m: LinearModel, x: Sample) -> float:
    """(w.x + b) / ||w||; positive on the +1 side. Magnitude is the geometric
    distance to the hyperplane."""
    nrm = float(np.linalg.norm(m.w))
    if nrm == 0.0:
        raise DegenerateModelError("zero weight vector: distance undefined")
    return raw_score(m, x) / nrm

def margin(m: LinearModel, x: Sample, y: int) -> float:
    """y.(w.x + b); below 1 the sample violates the soft margin."""
    return y * raw_score(m, x)


def decision_values(m: LinearModel, X) -> np.ndarray:
    """Scores w.x + b for a (n, dim) matrix, sparse or dense."""
    return np.asarray(X @ m.w).ravel() + m.b


def predict(m: LinearModel, X) -> np.ndarray:
    vals = decision_values(m, X)
    return np.where(vals >= 0.0, 1, -1)


_HEADER = "awwsvm-model 1"


def save_model(m: LinearModel, path: str) -> None:
    """Text serialization: header (dim, bias convention, label map), bias,
    then one weight per line. Floats use repr so the round trip is exact."""
    lines = [_HEADER, f"dim {m.dim}", "bias augmented-last"]
    if m.label_map:
        pairs = " ".join(f"{k}:{v}" for k, v in sorted(m.label_map.items()))
        lines.append(f"labels {pairs}")
    else:
        lines.append("labels none")
    lines.append(f"b {m.b!r}")
    lines.extend(repr(float(v)) for v in m.w)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path: str) -> LinearModel:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    if not lines or lines[0] != _HEADER:
        raise ValueError(f"{path}: not an awwsvm model file")
    dim = int(lines[1].split()[1])
    if lines[2] != "bias augmented-last":
        raise ValueError(f"{path}: unknown bias convention {lines[2]!r}")
    label_map = None
    if lines[3] != "labels none":
        label_map = {}
        for pair in lines[3].split()[1:]:
            k, _, v = pair.partition(":")
            label_map[int(k)] = int(v)
    b = float(lines[4].split(" ", 1)[1])
    w = np.array([float(v) for v in lines[5:5 + dim]], dtype=np.float64)
    if len(w) != dim:
        raise ValueError(f"{path}: expected {dim} weights, found {len(w)}")
    return LinearModel(w=w, b=b, label_map=label_map)
