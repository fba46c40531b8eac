"""Reading, writing, normalising, subsetting and generating datasets.

Text format: one point per line, delimiter-separated reals (whitespace or
comma, auto-detected), optional integer label column, ``#`` comments.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import Dataset
from .errors import ConfigError, DataError

LABEL_COLUMNS = ("none", "first", "last")

#: Expected (n, p, classes) for the benchmark datasets.
KNOWN_DATASETS = {
    "imbalance2": (2100, 2, 2),
    "imbalance4": (4200, 2, 4),
    "imbalance6": (6300, 2, 6),
    "imbalance": (6500, 2, 8),
    "dim2": (1351, 2, 9),
    "dim6": (4051, 6, 9),
    "dim10": (6751, 10, 9),
    "dim15": (10126, 15, 9),
    "s1": (5000, 2, 15),
    "s2": (5000, 2, 15),
    "s3": (5000, 2, 15),
    "s4": (5000, 2, 15),
    "r15": (600, 2, 15),
    "d31": (3100, 2, 31),
    "newthyroid": (215, 5, 3),
    "banknote": (1372, 4, 2),
    "yeast": (1484, 8, 10),
    "pendigits3": (2218, 16, 3),
    "pendigits5": (3838, 16, 5),
    "pendigits8": (6056, 16, 8),
    "pendigits": (7494, 16, 10),
}

#: Class subsets carved out of a parent dataset.
SUBSETS = {
    "imbalance2": ("imbalance", (6, 7)),
    "imbalance4": ("imbalance", (2, 6, 7, 8)),
    "imbalance6": ("imbalance", (1, 3, 4, 5, 6, 8)),
    "pendigits3": ("pendigits", (1, 3, 5)),
    "pendigits5": ("pendigits", (0, 2, 4, 6, 7)),
    "pendigits8": ("pendigits", (0, 1, 2, 3, 4, 5, 6, 7)),
}

_SPLIT = re.compile(r"[,\s]+")


def _parse_cell(text, lineno, kind=float):
    try:
        return kind(text)
    except ValueError:
        raise DataError(f"line {lineno}: non-numeric cell {text!r}") from None


def load(path, label_column: str = "none", delimiter: Optional[str] = None) -> Dataset:
    """Parse a delimited text file into a :class:`Dataset`.

    ``delimiter=None`` accepts commas and/or whitespace. ``label_column``
    is ``"none"``, ``"first"`` or ``"last"``.
    """
    if label_column not in LABEL_COLUMNS:
        raise ConfigError(f"label_column must be one of {LABEL_COLUMNS}, got {label_column!r}")
    rows, labels = [], []
    width = None
    try:
        handle = open(path, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    with handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            cells = [c for c in (_SPLIT.split(line) if delimiter is None else line.split(delimiter))]
            cells = [c.strip() for c in cells if c.strip() != ""]
            if width is None:
                width = len(cells)
                if label_column != "none" and width < 2:
                    raise DataError(f"line {lineno}: a label column needs at least two columns")
            elif len(cells) != width:
                raise DataError(f"line {lineno}: expected {width} columns, found {len(cells)}")
            if label_column == "first":
                labels.append(_parse_label(cells.pop(0), lineno))
            elif label_column == "last":
                labels.append(_parse_label(cells.pop(), lineno))
            rows.append([_parse_cell(c, lineno) for c in cells])
    if not rows:
        raise DataError(f"{path}: no data rows")
    points = np.array(rows, dtype=np.float64)
    if not np.all(np.isfinite(points)):
        bad = int(np.argwhere(~np.isfinite(points))[0][0])
        raise DataError(f"{path}: non-finite value in data row {bad + 1}")
    return Dataset(points, np.array(labels, dtype=np.int64) if labels else None)


def _parse_label(text, lineno):
    value = _parse_cell(text, lineno)
    if value != int(value):
        raise DataError(f"line {lineno}: label {text!r} is not an integer")
    return int(value)


def write(ds: Dataset, path, delimiter: str = ",") -> None:
    """Write ``ds`` using shortest round-trip float reprs, so ``load`` is exact."""
    with open(path, "w", encoding="utf-8") as fh:
        for i, row in enumerate(ds.points):
            cells = [repr(float(x)) for x in row]
            if ds.labels is not None:
                cells.append(str(int(ds.labels[i])))
            fh.write(delimiter.join(cells) + "\n")


def subset_by_class(ds: Dataset, classes: Iterable[int]) -> Dataset:
    """Keep the points whose label is in ``classes``, preserving order."""
    if ds.labels is None:
        raise DataError("subset_by_class needs a labelled dataset")
    keep = np.isin(ds.labels, sorted(set(int(c) for c in classes)))
    if not keep.any():
        raise DataError(f"no points carry any of the classes {sorted(set(classes))}")
    return Dataset(ds.points[keep], ds.labels[keep])


def normalize_min_max(ds: Dataset) -> Dataset:
    """Rescale each attribute to [0, 1]; constant attributes become 0."""
    x = ds.points
    lo = x.min(axis=0)
    span = x.max(axis=0) - lo
    out = np.zeros_like(x)
    varying = span > 0
    out[:, varying] = (x[:, varying] - lo[varying]) / span[varying]
    return Dataset(out, None if ds.labels is None else ds.labels.copy())


# -- synthetic data ---------------------------------------------------------

@dataclass
class ClusterSpec:
    center: Sequence[float]
    std: float
    count: int


@dataclass
class GeneratorSpec:
    clusters: list
    seed: int

    def __post_init__(self):
        if not self.clusters:
            raise ConfigError("generator needs at least one cluster")
        dims = {len(c.center) for c in self.clusters}
        if len(dims) != 1 or 0 in dims:
            raise ConfigError("all cluster centers must share one non-zero dimension")
        for c in self.clusters:
            if c.count < 1:
                raise ConfigError(f"cluster size must be >= 1, got {c.count}")
            if not c.std > 0:
                raise ConfigError(f"cluster std must be > 0, got {c.std}")


def parse_clusters(text: str) -> list:
    """Parse ``"x,y:std:count;x,y:std:count"`` into cluster specs."""
    clusters = []
    for part in filter(None, (p.strip() for p in text.split(";"))):
        fields = part.split(":")
        if len(fields) != 3:
            raise ConfigError(f"cluster {part!r} must read center:std:count")
        try:
            center = [float(v) for v in fields[0].split(",")]
            clusters.append(ClusterSpec(center, float(fields[1]), int(fields[2])))
        except ValueError:
            raise ConfigError(f"cannot parse cluster {part!r}") from None
    return clusters


def generate(spec: GeneratorSpec) -> Dataset:
    """Isotropic Gaussian mixture; labels are the cluster ordinals."""
    rng = np.random.default_rng(spec.seed)
    blocks, labels = [], []
    for j, c in enumerate(spec.clusters):
        center = np.asarray(c.center, dtype=np.float64)
        blocks.append(center + c.std * rng.standard_normal((c.count, center.size)))
        labels.append(np.full(c.count, j, dtype=np.int64))
    return Dataset(np.vstack(blocks), np.concatenate(labels))


def imbalanced_pair(big: int = 2000, small: int = 100, separation: float = 10.0,
                    std: float = 1.0, seed: int = 0, dim: int = 2) -> Dataset:
    """Two Gaussian classes ``separation * std`` apart along the diagonal."""
    offset = separation * std / np.sqrt(dim)
    spec = GeneratorSpec([ClusterSpec([0.0] * dim, std, big),
                          ClusterSpec([offset] * dim, std, small)], seed)
    return generate(spec)


# -- manifest ---------------------------------------------------------------

@dataclass
class ManifestEntry:
    id: str
    path: str
    n: int
    p: int
    classes: int


def read_manifest(path) -> dict:
    """Parse ``id path n p classes`` records; relative paths resolve against the manifest."""
    entries = {}
    base = Path(path).parent
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DataError(f"cannot read manifest {path}: {exc.strerror}") from None
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 5:
            raise DataError(f"manifest line {lineno}: expected 'id path n p classes'")
        ident, file_path = fields[0], fields[1]
        try:
            n, p, k = (int(v) for v in fields[2:])
        except ValueError:
            raise DataError(f"manifest line {lineno}: n, p, classes must be integers") from None
        if not os.path.isabs(file_path):
            file_path = str(base / file_path)
        entries[ident] = ManifestEntry(ident, file_path, n, p, k)
    return entries


def _verify(ds: Dataset, ident: str, n: int, p: int, classes: int) -> None:
    got_k = len(np.unique(ds.labels)) if ds.labels is not None else None
    if ds.n != n or ds.p != p or (got_k is not None and got_k != classes):
        raise DataError(
            f"dataset {ident!r}: expected (n, p, classes) = ({n}, {p}, {classes}), "
            f"found ({ds.n}, {ds.p}, {got_k})"
        )


def _load_entry(entry: ManifestEntry) -> Dataset:
    # A file with one extra column carries labels in the last column.
    try:
        with open(entry.path, encoding="utf-8") as fh:
            first = next((ln for ln in fh if ln.strip() and not ln.startswith("#")), "")
    except OSError as exc:
        raise DataError(f"cannot read {entry.path}: {exc.strerror}") from None
    width = len([c for c in _SPLIT.split(first.strip()) if c])
    ds = load(entry.path, label_column="last" if width == entry.p + 1 else "none")
    _verify(ds, entry.id, entry.n, entry.p, entry.classes)
    return ds


def load_from_manifest(manifest, ident: str) -> Dataset:
    """Load dataset ``ident`` from a manifest, checking its (n, p, classes).

    Class subsets such as ``imbalance2`` are built from their parent
    dataset when only the parent is listed.
    """
    entries = read_manifest(manifest) if not isinstance(manifest, dict) else manifest
    if ident in entries:
        return _load_entry(entries[ident])
    if ident in SUBSETS and SUBSETS[ident][0] in entries:
        parent, classes = SUBSETS[ident]
        ds = subset_by_class(_load_entry(entries[parent]), classes)
        _verify(ds, ident, *KNOWN_DATASETS[ident])
        return ds
    raise DataError(f"dataset {ident!r} not found in manifest")
