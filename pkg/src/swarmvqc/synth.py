"""Synthetic dataset generators.

Two families: a separable pair of Gaussian clouds for pipeline checks,
and procedurally drawn 28x28 "0"/"1" digit images (elliptical rings vs
slanted strokes) standing in for real handwritten digits when no
network is available.  Both emit the standard CSV grammar.
"""

from __future__ import annotations

import numpy as np
from scipy.ndimage import gaussian_filter

from .data import Dataset

IMAGE_SIDE = 28


def two_gaussians(n_train: int, n_val: int, n_test: int, n_features: int = 64,
                  separation: float = 6.0, seed: int = 0) -> tuple[Dataset, Dataset, Dataset]:
    """Two isotropic Gaussian classes whose means sit ``separation`` apart."""
    rng = np.random.default_rng(seed)
    direction = rng.normal(size=n_features)
    direction /= np.linalg.norm(direction)
    offset = separation * direction

    def make(n: int, tag: str) -> Dataset:
        labels = rng.integers(0, 2, size=n)
        noise = rng.normal(size=(n, n_features))
        features = noise + np.outer(labels, offset)
        return Dataset(features, labels, split_tag=tag)

    return make(n_train, "train"), make(n_val, "validation"), make(n_test, "test")


def _draw_zero(rng: np.random.Generator) -> np.ndarray:
    side = IMAGE_SIDE
    ys, xs = np.mgrid[0:side, 0:side]
    cx = 13.5 + rng.normal(0, 1.5)
    cy = 13.5 + rng.normal(0, 1.5)
    rx = rng.uniform(4.5, 7.5)
    ry = rng.uniform(6.5, 9.5)
    thickness = rng.uniform(0.12, 0.22)
    radius = np.sqrt(((xs - cx) / rx) ** 2 + ((ys - cy) / ry) ** 2)
    return np.exp(-((radius - 1.0) / thickness) ** 2)


def _draw_one(rng: np.random.Generator) -> np.ndarray:
    side = IMAGE_SIDE
    ys, xs = np.mgrid[0:side, 0:side]
    cx = 13.5 + rng.normal(0, 2.0)
    cy = 13.5 + rng.normal(0, 1.0)
    slant = rng.normal(0, 0.18)
    half_length = rng.uniform(7.5, 10.5)
    width = rng.uniform(0.9, 1.8)
    column = cx + slant * (ys - cy)
    stroke = np.exp(-((xs - column) / width) ** 2)
    stroke[np.abs(ys - cy) > half_length] = 0.0
    return stroke


def digits01(n_train: int, n_val: int, n_test: int,
             seed: int = 0) -> tuple[Dataset, Dataset, Dataset]:
    """Synthetic 0-vs-1 digit images, flattened to 784 features in [0, 1]."""
    rng = np.random.default_rng(seed)

    def make(n: int, tag: str) -> Dataset:
        labels = rng.integers(0, 2, size=n)
        images = np.empty((n, IMAGE_SIDE * IMAGE_SIDE))
        for i, label in enumerate(labels):
            image = _draw_one(rng) if label else _draw_zero(rng)
            image = gaussian_filter(image * rng.uniform(0.85, 1.0), sigma=0.6)
            image += rng.normal(0.0, 0.06, image.shape)
            images[i] = np.clip(image, 0.0, 1.0).ravel()
        return Dataset(images, labels, split_tag=tag)

    return make(n_train, "train"), make(n_val, "validation"), make(n_test, "test")


def write_dataset_csv(dataset: Dataset, path, fmt: str | None = None) -> None:
    """Write the CSV grammar; ``fmt`` trades file size for precision."""
    n_features = dataset.features.shape[1]
    header = "label," + ",".join(f"f{i}" for i in range(n_features))
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(header + "\n")
        for label, row in zip(dataset.labels, dataset.features):
            if fmt is None:
                cells = ",".join(repr(float(v)) for v in row)
            else:
                cells = ",".join(fmt % v for v in row)
            handle.write(f"{label},{cells}\n")


def _main() -> None:
    import argparse
    from pathlib import Path

    parser = argparse.ArgumentParser(description="Generate synthetic dataset CSVs")
    parser.add_argument("family", choices=["gaussians", "digits"])
    parser.add_argument("--out", type=Path, required=True, help="output directory")
    parser.add_argument("--name", default=None, help="dataset file prefix")
    parser.add_argument("--train", type=int, default=500)
    parser.add_argument("--val", type=int, default=200)
    parser.add_argument("--test", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    name = args.name or args.family
    args.out.mkdir(parents=True, exist_ok=True)
    if args.family == "gaussians":
        splits = two_gaussians(args.train, args.val, args.test, seed=args.seed)
        fmt = None
    else:
        splits = digits01(args.train, args.val, args.test, seed=args.seed)
        fmt = "%.6g"
    for split, suffix in zip(splits, ("train", "val", "test")):
        target = args.out / f"{name}_{suffix}.csv"
        write_dataset_csv(split, target, fmt=fmt)
        print(f"wrote {target} ({len(split)} samples)")


if __name__ == "__main__":
    _main()
