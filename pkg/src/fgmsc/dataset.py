"""Multi-view datasets: manifest/CSV ingestion, min-max scaling, synthetic data."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

SAMPLES_ROWS = "samples_rows"
FEATURES_ROWS = "features_rows"
ORIENTATIONS = (SAMPLES_ROWS, FEATURES_ROWS)


class DataError(ValueError):
    """Raised for malformed manifests, view files or label files."""


@dataclass(frozen=True)
class DatasetSpec:
    name: str
    view_files: List[Tuple[Path, str]]
    labels_path: Optional[Path]
    n_clusters: int


@dataclass
class MultiViewDataset:
    """t views over the same n samples.

    Each entry of ``views`` is a ``d_v x n`` array (features as rows).
    """

    views: List[np.ndarray]
    n_clusters: int
    labels: Optional[np.ndarray] = None
    name: str = "dataset"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.views:
            raise DataError("views must be non-empty")
        self.views = [np.asarray(v, dtype=float) for v in self.views]
        n = self.views[0].shape[1]
        for v, X in enumerate(self.views):
            if X.ndim != 2:
                raise DataError(f"view {v} is not a matrix")
            if X.shape[1] != n:
                raise DataError(
                    f"view {v} has {X.shape[1]} samples, expected {n}")
            if not np.all(np.isfinite(X)):
                raise DataError(f"view {v} has non-finite entries")
        if self.n_clusters < 1:
            raise DataError("n_clusters must be >= 1")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=int)
            if self.labels.shape != (n,):
                raise DataError(
                    f"labels has length {self.labels.size}, expected {n}")
            if np.unique(self.labels).size > self.n_clusters:
                raise DataError("more distinct labels than n_clusters")

    @property
    def n_samples(self) -> int:
        return self.views[0].shape[1]

    @property
    def n_views(self) -> int:
        return len(self.views)

    def normalized(self) -> "MultiViewDataset":
        return MultiViewDataset([normalize_unit_range(X) for X in self.views],
                                self.n_clusters, self.labels, self.name,
                                dict(self.meta))


def load_manifest(path) -> DatasetSpec:
    """Read a JSON manifest; relative paths resolve against its directory."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"manifest not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"manifest is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise DataError("manifest must be a JSON object")

    base = path.resolve().parent

    def resolve(p):
        if not isinstance(p, str) or not p:
            raise DataError(f"path must be a non-empty string, got {p!r}")
        q = Path(p)
        return q if q.is_absolute() else (base / q).resolve()

    views = raw.get("views")
    if not isinstance(views, list):
        raise DataError("views must be a list")
    if not views:
        raise DataError("views must be non-empty")
    view_files = []
    for k, entry in enumerate(views):
        if not isinstance(entry, dict) or "path" not in entry:
            raise DataError(f"views[{k}] must be an object with a path")
        orient = entry.get("orientation", SAMPLES_ROWS)
        if orient not in ORIENTATIONS:
            raise DataError(f"views[{k}].orientation must be one of "
                            f"{ORIENTATIONS}, got {orient!r}")
        view_files.append((resolve(entry["path"]), orient))

    n_clusters = raw.get("n_clusters")
    if isinstance(n_clusters, bool) or not isinstance(n_clusters, int):
        raise DataError("n_clusters must be an integer")
    if n_clusters < 1:
        raise DataError("n_clusters must be >= 1")

    labels = raw.get("labels")
    labels_path = None if labels is None else resolve(labels)
    name = raw.get("name", path.stem)
    if not isinstance(name, str):
        raise DataError("name must be a string")
    return DatasetSpec(name, view_files, labels_path, n_clusters)


def _read_csv_rows(path: Path) -> List[List[str]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    return rows


def load_view_matrix(path, orientation: str = SAMPLES_ROWS) -> np.ndarray:
    """Load a headerless numeric CSV as a ``d_v x n`` matrix."""
    if orientation not in ORIENTATIONS:
        raise DataError(f"unknown orientation {orientation!r}")
    path = Path(path)
    rows = _read_csv_rows(path)
    if not rows:
        raise DataError(f"{path}: empty file")
    width = len(rows[0])
    out = np.empty((len(rows), width))
    for r, row in enumerate(rows):
        if len(row) != width:
            raise DataError(f"{path}: row {r + 1} has {len(row)} columns, "
                            f"expected {width}")
        for c, cell in enumerate(row):
            try:
                out[r, c] = float(cell)
            except ValueError:
                raise DataError(f"{path}: non-numeric cell {cell!r} at "
                                f"row {r + 1}, column {c + 1}") from None
    if not np.all(np.isfinite(out)):
        raise DataError(f"{path}: non-finite entries")
    return out.T.copy() if orientation == SAMPLES_ROWS else out


def load_labels(path) -> np.ndarray:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").split()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    try:
        return np.array([int(s) for s in lines], dtype=int)
    except ValueError as exc:
        raise DataError(f"{path}: labels must be integers ({exc})") from None


def load_dataset(spec: DatasetSpec) -> MultiViewDataset:
    views = [load_view_matrix(p, o) for p, o in spec.view_files]
    labels = load_labels(spec.labels_path) if spec.labels_path else None
    return MultiViewDataset(views, spec.n_clusters, labels, spec.name)


def write_view_matrix(path, X: np.ndarray, orientation: str = SAMPLES_ROWS):
    """Inverse of :func:`load_view_matrix` (``repr`` keeps full precision)."""
    M = X.T if orientation == SAMPLES_ROWS else X
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for row in M:
            fh.write(",".join(repr(float(x)) for x in row) + "\n")


def write_labels(path, labels: Sequence[int]):
    Path(path).write_text("".join(f"{int(v)}\n" for v in labels),
                          encoding="utf-8")


def write_dataset(ds: MultiViewDataset, directory) -> Path:
    """Write views, labels and a manifest into ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    views = []
    for v, X in enumerate(ds.views):
        fname = f"view{v + 1}.csv"
        write_view_matrix(directory / fname, X)
        views.append({"path": fname, "orientation": SAMPLES_ROWS})
    labels = None
    if ds.labels is not None:
        labels = "labels.txt"
        write_labels(directory / labels, ds.labels)
    manifest = {"name": ds.name, "views": views, "labels": labels,
                "n_clusters": ds.n_clusters}
    out = directory / "manifest.json"
    out.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return out


def normalize_unit_range(X: np.ndarray) -> np.ndarray:
    """Min-max scale every feature (row) to [0, 1]; constant rows become 0."""
    X = np.asarray(X, dtype=float)
    if not np.all(np.isfinite(X)):
        raise DataError("cannot normalize non-finite data")
    lo = X.min(axis=1, keepdims=True)
    span = X.max(axis=1, keepdims=True) - lo
    out = np.zeros_like(X)
    ok = span[:, 0] > 0
    out[ok] = (X[ok] - lo[ok]) / span[ok]
    # guard against 1 + eps from rounding
    return np.clip(out, 0.0, 1.0)


def _cluster_centers(rng, c, d, separation):
    if d >= c:
        # regular simplex vertices: pairwise distance == separation
        basis, _ = np.linalg.qr(rng.standard_normal((d, c)))
        return separation / np.sqrt(2.0) * basis.T
    return separation * rng.standard_normal((c, d))


def generate_blobs(n_per_cluster: int, c: int, t: int,
                   dims: Optional[Sequence[int]] = None,
                   separation: float = 10.0, noise: float = 1.0,
                   seed: int = 0) -> MultiViewDataset:
    """Isotropic Gaussian clusters, independently placed in every view.

    Samples are ordered cluster by cluster, so ``labels`` is
    ``[0]*n_per_cluster + [1]*n_per_cluster + ...``.
    """
    if min(n_per_cluster, c, t) < 1:
        raise ValueError("n_per_cluster, c and t must be positive")
    if separation <= 0 or noise < 0:
        raise ValueError("separation must be > 0 and noise >= 0")
    dims = list(dims) if dims is not None else [5 + 3 * v for v in range(t)]
    if len(dims) != t or min(dims) < 1:
        raise ValueError("dims must list one positive size per view")
    rng = np.random.default_rng(seed)
    labels = np.repeat(np.arange(c), n_per_cluster)
    views = []
    for d in dims:
        centers = _cluster_centers(rng, c, d, separation)
        pts = centers[labels] + noise * rng.standard_normal((labels.size, d))
        views.append(pts.T)
    return MultiViewDataset(views, c, labels, f"blobs:{n_per_cluster}x{c}x{t}",
                            meta={"separation": separation, "noise": noise,
                                  "seed": seed})


def generate_corrupted_blobs(n_per_cluster: int, c: int, t: int,
                             dims: Optional[Sequence[int]] = None,
                             separation: float = 6.0, noise: float = 1.0,
                             corrupt: float = 0.2,
                             seed: int = 0) -> MultiViewDataset:
    """Blobs where each view moves a random ``corrupt`` fraction of samples
    into a wrong cluster. Corruptions are drawn independently per view, so
    every sample is clean in most views."""
    if not 0 <= corrupt < 1:
        raise ValueError("corrupt must be in [0, 1)")
    ds = generate_blobs(n_per_cluster, c, t, dims, separation, noise, seed)
    rng = np.random.default_rng([seed, 1])
    labels = ds.labels
    n = labels.size
    views = []
    for X in ds.views:
        X = X.copy()
        centers = np.stack([X[:, labels == k].mean(axis=1) for k in range(c)])
        bad = rng.random(n) < corrupt
        shift = rng.integers(1, c, size=n) if c > 1 else np.zeros(n, int)
        wrong = (labels + shift) % c
        X[:, bad] += (centers[wrong[bad]] - centers[labels[bad]]).T
        views.append(X)
    return MultiViewDataset(views, c, labels,
                            f"corrupted:{n_per_cluster}x{c}x{t}",
                            meta={"separation": separation, "noise": noise,
                                  "corrupt": corrupt, "seed": seed})


# Seven 2-D points per view. Nodes 0-3 form one class and 4-6 the other;
# in every view one node sits next to the opposite class, and which node is
# displaced differs from view to view.
_TOY7_VIEWS = (
    ((1.0, -0.3), (0.8, -0.3), (0.0, 0.6), (-0.2, 1.4),
     (1.6, 0.2), (4.5, -0.1), (5.0, -1.0)),
    ((0.6, -0.7), (0.7, 0.1), (3.9, -0.2), (1.0, 0.8),
     (5.2, -0.2), (4.7, 0.5), (5.1, -0.3)),
    ((2.9, -0.1), (-0.7, -0.4), (-0.6, -0.6), (0.5, 1.1),
     (5.0, 0.2), (4.9, 0.3), (4.3, 0.1)),
    ((-0.2, -0.6), (0.4, -0.2), (0.8, 0.0), (3.5, 0.2),
     (4.3, 0.4), (4.9, 1.0), (5.0, 0.3)),
)
# Solver settings for toy7: with 7 nodes the default neighbour counts would
# connect every node to both classes.
TOY7_SETTINGS = {"m": 2, "k_init": 3}


def generate_toy7() -> MultiViewDataset:
    """The fixed 7-node, 4-view toy set with two classes (4 + 3 nodes)."""
    views = [np.array(v, dtype=float).T for v in _TOY7_VIEWS]
    labels = np.array([0, 0, 0, 0, 1, 1, 1])
    return MultiViewDataset(views, 2, labels, "toy7")
