"""Reproducible benchmark harness: methods x sizes x noise levels x images.

Defaults mirror the benchmarking protocol the package is verified against:
the eight 2-D methods on 2x2, 4x4, and 8x8 pixel images, eight random
images per size, the noise grid {0, 0.01, 0.1, 0.2, 0.5, 0.9, 1.0}, and a
12-qubit simulation cap.  Cells whose register budget exceeds the cap are
emitted as skipped records rather than dropped, so the skip set is always
derivable from the cap.

A full run is a pure function of its configuration: test images derive
from the master seed per (size, image id, channels) and are therefore
identical across methods, and every cell samples from its own derived
sub-seed, so records are independent of execution order and worker count.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import encodings
from .errors import DomainError
from .metrics import psnr_display_cap
from .model import ImageArray
from .rng import derive_seed, generator
from .simcore import NoiseMode, NoiseSpec

DEFAULT_METHODS = ("frqi", "neqr", "ifrqi", "qualpi", "frqci", "mcqi", "ncqi", "qrci")
DEFAULT_SIZES = (2, 4, 8)
DEFAULT_LAMBDAS = (0.0, 0.01, 0.1, 0.2, 0.5, 0.9, 1.0)
DEFAULT_SHOTS = 1 << 14
DEFAULT_MAX_QUBITS = 12
DEFAULT_IMAGES_PER_SIZE = 8


@dataclass(frozen=True)
class BenchmarkConfig:
    methods: tuple = DEFAULT_METHODS
    sizes: tuple = DEFAULT_SIZES
    images_per_size: int = DEFAULT_IMAGES_PER_SIZE
    lambdas: tuple = DEFAULT_LAMBDAS
    shots: int = DEFAULT_SHOTS
    max_qubits: int = DEFAULT_MAX_QUBITS
    seed: int = 0

    def __post_init__(self):
        for name in self.methods:
            encodings.lookup(name)
        if self.images_per_size < 1:
            raise DomainError("need at least one image per size")
        if self.shots < 0:
            raise DomainError("shots must be >= 0 (0 = exact probabilities)")

    @classmethod
    def from_json(cls, path) -> "BenchmarkConfig":
        with open(path, "r", encoding="utf-8") as handle:
            raw = json.load(handle)
        known = {f.name for f in cls.__dataclass_fields__.values()}  # type: ignore[attr-defined]
        unknown = set(raw) - known
        if unknown:
            raise DomainError(f"unknown benchmark config keys: {sorted(unknown)}")
        for key in ("methods", "sizes", "lambdas"):
            if key in raw:
                raw[key] = tuple(raw[key])
        return cls(**raw)


@dataclass(frozen=True)
class BenchmarkRecord:
    method: str
    size: int
    lam: float
    shots: int
    image_id: int
    seed: int
    pcc: float | None = None
    psnr_db: float | None = None
    skipped: bool = False
    skip_reason: str = ""


def benchmark_image(config: BenchmarkConfig, size: int, image_id: int,
                    channels: int) -> ImageArray:
    """The shared random test image for one (size, image id, channels) cell.

    Uniform independent 8-bit pixels per channel; identical across methods
    of the same family because the derivation ignores the method.
    """
    gen = generator(derive_seed(config.seed, "image", size, image_id, channels))
    pixels = gen.integers(0, 256, size=(size, size, channels)) / 255.0
    return ImageArray(pixels)


def _cell_seed(config: BenchmarkConfig, method: str, size: int, lam: float,
               image_id: int) -> int:
    return derive_seed(config.seed, "cell", method, size, repr(float(lam)), image_id)


def plan(config: BenchmarkConfig) -> list:
    """All cells in canonical order, with capacity skips already marked."""
    cells = []
    for method in sorted(config.methods):
        descriptor = encodings.lookup(method)
        for size in sorted(config.sizes):
            budget = descriptor.budget((size, size))
            reason = ""
            if budget > config.max_qubits:
                reason = f"requires {budget} qubits, cap is {config.max_qubits}"
            for lam in sorted(config.lambdas):
                for image_id in range(config.images_per_size):
                    cells.append(BenchmarkRecord(
                        method=method, size=size, lam=float(lam),
                        shots=config.shots, image_id=image_id,
                        seed=_cell_seed(config, method, size, lam, image_id),
                        skipped=bool(reason), skip_reason=reason,
                    ))
    return cells


def _run_cell(config: BenchmarkConfig, cell: BenchmarkRecord) -> BenchmarkRecord:
    if cell.skipped:
        return cell
    descriptor = encodings.lookup(cell.method)
    image = benchmark_image(config, cell.size, cell.image_id, descriptor.channels)
    if config.shots == 0:
        noise = NoiseSpec(cell.lam, NoiseMode.GLOBAL) if cell.lam > 0 else None
    else:
        noise = NoiseSpec(cell.lam, NoiseMode.TRAJECTORIES) if cell.lam > 0 else None
    _, pair = encodings.roundtrip(
        cell.method, image, config.shots, noise=noise, seed=cell.seed,
        max_qubits=config.max_qubits,
    )
    return replace(cell, pcc=pair.pcc, psnr_db=pair.psnr_db)


def run(config: BenchmarkConfig, workers: int = 1) -> list:
    """Execute all cells; the result is canonical regardless of ``workers``."""
    cells = plan(config)
    if workers <= 1:
        return [_run_cell(config, cell) for cell in cells]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda cell: _run_cell(config, cell), cells))


# ---------------------------------------------------------------------------
# aggregation and CSV output


@dataclass(frozen=True)
class SummaryRow:
    method: str
    size: int
    lam: float
    n: int
    mean_pcc: float
    mean_psnr_db: float | None  # inf cells excluded; None if all were inf
    inf_count: int
    mean_psnr_display: float

    @classmethod
    def from_records(cls, records) -> "SummaryRow":
        pccs = [r.pcc for r in records]
        psnrs = [r.psnr_db for r in records]
        finite = [p for p in psnrs if math.isfinite(p)]
        return cls(
            method=records[0].method, size=records[0].size, lam=records[0].lam,
            n=len(records),
            mean_pcc=float(np.mean(pccs)),
            mean_psnr_db=float(np.mean(finite)) if finite else None,
            inf_count=len(psnrs) - len(finite),
            mean_psnr_display=float(np.mean([psnr_display_cap(p) for p in psnrs])),
        )


def summarize(records) -> list:
    groups = {}
    for record in records:
        if record.skipped:
            continue
        groups.setdefault((record.method, record.size, record.lam), []).append(record)
    return [SummaryRow.from_records(groups[key]) for key in sorted(groups)]


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        return repr(value)
    return str(value)


def write_records_csv(path, records) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["method", "size", "lambda", "shots", "image_id",
                         "pcc", "psnr_db", "seed", "skipped", "skip_reason"])
        for r in records:
            writer.writerow([r.method, r.size, _format(r.lam), r.shots, r.image_id,
                             _format(r.pcc), _format(r.psnr_db), r.seed,
                             int(r.skipped), r.skip_reason])


def write_summary_csv(path, summary) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["method", "size", "lambda", "n", "mean_pcc",
                         "mean_psnr_db", "psnr_inf_count", "mean_psnr_display"])
        for row in summary:
            writer.writerow([row.method, row.size, _format(row.lam), row.n,
                             _format(row.mean_pcc), _format(row.mean_psnr_db),
                             row.inf_count, _format(row.mean_psnr_display)])


def write_plotdata_csv(path, summary) -> None:
    """Noise level on the x axis: one series point per (method, size, lambda)."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["lambda", "method", "size", "mean_pcc", "mean_psnr_display"])
        for row in sorted(summary, key=lambda r: (r.lam, r.method, r.size)):
            writer.writerow([_format(row.lam), row.method, row.size,
                             _format(row.mean_pcc), _format(row.mean_psnr_display)])
