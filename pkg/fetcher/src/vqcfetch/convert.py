"""Download, cache, and convert archives into dataset CSVs.

Output grammar (shared with the swarmvqc loader): header row
``label,f0,...,f{m-1}``, one sample per line, label a nonnegative
integer, features decimal reals.  Pixels are flattened row-major and
scaled to [0, 1]; RGB sources are grayscaled by channel mean first.
Conversion is deterministic, so re-running over a warm cache reproduces
every output byte; SHA-256 checksums are recorded for provenance.
"""

from __future__ import annotations

import hashlib
import shutil
import urllib.request
from pathlib import Path

import numpy as np

from .sources import SourceSpec, Split, archive_files, load_splits


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _download(url: str, target: Path) -> None:
    try:
        with urllib.request.urlopen(url) as response, open(target, "wb") as out:
            shutil.copyfileobj(response, out)
    except OSError as exc:
        target.unlink(missing_ok=True)
        raise OSError(f"download failed for {url}: {exc}") from exc


def ensure_cached(spec: SourceSpec) -> None:
    """Download any missing archive; verify checksums of cached ones."""
    spec.cache_dir.mkdir(parents=True, exist_ok=True)
    for filename, url in archive_files(spec.name):
        archive = spec.cache_dir / filename
        checksum_file = spec.cache_dir / f"{filename}.sha256"
        if not archive.exists():
            _download(url, archive)
            checksum_file.write_text(_sha256(archive) + "\n", encoding="utf-8")
            continue
        if checksum_file.exists():
            expected = checksum_file.read_text(encoding="utf-8").strip()
            actual = _sha256(archive)
            if actual != expected:
                raise ValueError(
                    f"checksum mismatch for {archive}: expected {expected}, got {actual}"
                )
        else:
            checksum_file.write_text(_sha256(archive) + "\n", encoding="utf-8")


def _flatten(images: np.ndarray) -> np.ndarray:
    array = np.asarray(images)
    if array.ndim == 4:  # (n, h, w, channels) -> channel-mean grayscale
        array = array.mean(axis=3)
    if array.ndim != 3:
        raise ValueError(f"expected image stack, got shape {array.shape}")
    return array.reshape(array.shape[0], -1) / 255.0


def write_split_csv(split: Split, path: Path) -> None:
    features = _flatten(split.images)
    labels = np.asarray(split.labels)
    if len(labels) != len(features):
        raise ValueError(f"{path.name}: {len(features)} images but {len(labels)} labels")
    header = "label," + ",".join(f"f{i}" for i in range(features.shape[1]))
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(header + "\n")
        for label, row in zip(labels, features):
            cells = ",".join("%.6g" % value for value in row)
            handle.write(f"{int(label)},{cells}\n")


def fetch_and_convert(spec: SourceSpec) -> dict[str, Path]:
    """Produce ``<name>_{train,val,test}.csv`` plus a checksum manifest."""
    ensure_cached(spec)
    splits = load_splits(spec.name, spec.cache_dir)
    spec.out_dir.mkdir(parents=True, exist_ok=True)
    outputs: dict[str, Path] = {}
    checksum_lines = []
    for tag in ("train", "val", "test"):
        target = spec.out_dir / f"{spec.name}_{tag}.csv"
        write_split_csv(splits[tag], target)
        outputs[tag] = target
        checksum_lines.append(f"{_sha256(target)}  {target.name}")
    manifest = spec.out_dir / f"{spec.name}_checksums.txt"
    manifest.write_text("\n".join(checksum_lines) + "\n", encoding="utf-8")
    outputs["checksums"] = manifest
    return outputs
