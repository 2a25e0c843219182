"""Dataset registry and archive readers.

Two archive families: the classic IDX quartet for handwritten digits and
single-file .npz bundles for the biomedical collections.  Every reader
returns uint8 image stacks plus integer label vectors per split.
"""

from __future__ import annotations

import gzip
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MNIST_BASE = "https://ossci-datasets.s3.amazonaws.com/mnist"
MEDMNIST_BASE = "https://zenodo.org/records/10519652/files"

# Fraction of the digit training split carved off as validation (the
# source archive ships no official validation split).
MNIST_VAL_FRACTION = 0.1

_MEDMNIST_FILES = {
    "breast": "breastmnist.npz",
    "chest": "chestmnist.npz",
    "oct": "octmnist.npz",
    "pneumonia": "pneumoniamnist.npz",
    "organa": "organamnist.npz",
    "organc": "organcmnist.npz",
    "organs": "organsmnist.npz",
}

SUPPORTED_DATASETS = ("mnist",) + tuple(sorted(_MEDMNIST_FILES))


@dataclass
class SourceSpec:
    name: str
    cache_dir: Path
    out_dir: Path

    def __post_init__(self):
        self.name = self.name.lower()
        if self.name not in SUPPORTED_DATASETS:
            raise ValueError(
                f"unknown dataset {self.name!r}; supported: {', '.join(SUPPORTED_DATASETS)}"
            )
        self.cache_dir = Path(self.cache_dir)
        self.out_dir = Path(self.out_dir)


@dataclass
class Split:
    images: np.ndarray  # uint8, (n, h, w) or (n, h, w, channels)
    labels: np.ndarray  # int, (n,)


def archive_files(name: str) -> list[tuple[str, str]]:
    """(filename, url) pairs needed for one dataset."""
    if name == "mnist":
        files = [
            "train-images-idx3-ubyte.gz",
            "train-labels-idx1-ubyte.gz",
            "t10k-images-idx3-ubyte.gz",
            "t10k-labels-idx1-ubyte.gz",
        ]
        return [(f, f"{MNIST_BASE}/{f}") for f in files]
    filename = _MEDMNIST_FILES[name]
    return [(filename, f"{MEDMNIST_BASE}/{filename}?download=1")]


def read_idx_images(path: Path) -> np.ndarray:
    with gzip.open(path, "rb") as handle:
        magic, count, rows, cols = struct.unpack(">IIII", handle.read(16))
        if magic != 0x803:
            raise ValueError(f"{path}: bad image magic 0x{magic:x}")
        data = np.frombuffer(handle.read(), dtype=np.uint8)
    if data.size != count * rows * cols:
        raise ValueError(f"{path}: truncated image data")
    return data.reshape(count, rows, cols)


def read_idx_labels(path: Path) -> np.ndarray:
    with gzip.open(path, "rb") as handle:
        magic, count = struct.unpack(">II", handle.read(8))
        if magic != 0x801:
            raise ValueError(f"{path}: bad label magic 0x{magic:x}")
        data = np.frombuffer(handle.read(), dtype=np.uint8)
    if data.size != count:
        raise ValueError(f"{path}: truncated label data")
    return data.astype(np.int64)


def load_splits(name: str, cache_dir: Path) -> dict[str, Split]:
    """Assemble train/val/test splits from cached archives."""
    if name == "mnist":
        images = read_idx_images(cache_dir / "train-images-idx3-ubyte.gz")
        labels = read_idx_labels(cache_dir / "train-labels-idx1-ubyte.gz")
        if len(images) != len(labels):
            raise ValueError("image/label count mismatch in training archive")
        cut = len(images) - max(1, int(len(images) * MNIST_VAL_FRACTION))
        test_images = read_idx_images(cache_dir / "t10k-images-idx3-ubyte.gz")
        test_labels = read_idx_labels(cache_dir / "t10k-labels-idx1-ubyte.gz")
        return {
            "train": Split(images[:cut], labels[:cut]),
            "val": Split(images[cut:], labels[cut:]),
            "test": Split(test_images, test_labels),
        }
    with np.load(cache_dir / _MEDMNIST_FILES[name]) as archive:
        splits = {}
        for tag in ("train", "val", "test"):
            labels = np.asarray(archive[f"{tag}_labels"])
            if labels.ndim > 1:  # multi-label sources reduce to the first column
                labels = labels[:, 0]
            splits[tag] = Split(np.asarray(archive[f"{tag}_images"]),
                                labels.astype(np.int64))
    return splits
