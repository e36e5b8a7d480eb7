"""On-disk formats: statevectors, counts, voxel grids, and point clouds.

All binaries are little-endian with a four-byte magic:

* ``GQS1`` statevector: magic, u32 n_qubits, then 2^n (re, im) f64 pairs.
* ``GQV1`` voxel grid: magic, u32 dims[3], then f64 values row-major; a
  ``<path>.json`` sidecar carries normalization metadata when present.
* ``GQP1`` point cloud: magic, then raw f32 (x, y, z) triplets; the box
  size lives in a ``<path>.json`` sidecar (also used by the ASCII form).

Counts are JSON: ``{"n_qubits": n, "shots": s, "counts": {bitstring: c}}``
with bitstrings written most-significant qubit first; the exact-probability
sentinel (``shots == 0``) replaces ``counts`` with ``probabilities``.
"""

from __future__ import annotations

import json
import os
import struct

import numpy as np

from .errors import DomainError, FormatError
from .simcore import CountsHistogram, StateVector

STATE_MAGIC = b"GQS1"
GRID_MAGIC = b"GQV1"
POINTS_MAGIC = b"GQP1"


# -- statevector -------------------------------------------------------------

def write_state(path, state: StateVector) -> None:
    with open(path, "wb") as handle:
        handle.write(STATE_MAGIC)
        handle.write(struct.pack("<I", state.n_qubits))
        handle.write(np.ascontiguousarray(state.amplitudes, dtype="<c16").tobytes())


def read_state(path) -> StateVector:
    with open(path, "rb") as handle:
        blob = handle.read()
    if blob[:4] != STATE_MAGIC:
        raise FormatError(f"{path}: not a statevector file (bad magic)")
    (n_qubits,) = struct.unpack("<I", blob[4:8])
    expected = 8 + (1 << n_qubits) * 16
    if len(blob) != expected:
        raise FormatError(f"{path}: truncated statevector file")
    amps = np.frombuffer(blob[8:], dtype="<c16").astype(np.complex128)
    return StateVector(n_qubits, amps)


# -- counts ------------------------------------------------------------------

def bitstring(index: int, n_qubits: int) -> str:
    """Basis index as a bitstring, most significant qubit first."""
    return format(index, f"0{n_qubits}b")


def write_counts(path, histogram: CountsHistogram) -> None:
    payload = {
        "n_qubits": histogram.n_qubits,
        "shots": histogram.shots,
        "counts": {
            bitstring(i, histogram.n_qubits): int(c)
            for i, c in sorted(histogram.counts.items())
        },
    }
    _dump_json(path, payload)


def write_probabilities(path, probabilities, n_qubits: int) -> None:
    probs = np.asarray(probabilities, dtype=np.float64)
    payload = {
        "n_qubits": int(n_qubits),
        "shots": 0,
        "probabilities": {
            bitstring(i, n_qubits): float(p) for i, p in enumerate(probs) if p > 0.0
        },
    }
    _dump_json(path, payload)


def read_counts(path):
    """Load a counts file; returns ``(weights, n_qubits, shots)``.

    ``weights`` is a dense vector of counts (or probabilities for the
    exact sentinel ``shots == 0``).
    """
    try:
        with open(path, "r", encoding="utf-8") as handle:
            payload = json.load(handle)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid counts JSON ({exc})") from None
    try:
        n_qubits = int(payload["n_qubits"])
        shots = int(payload["shots"])
        table = payload["probabilities" if shots == 0 else "counts"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{path}: malformed counts payload ({exc})") from None
    weights = np.zeros(1 << n_qubits)
    for key, value in table.items():
        if len(key) != n_qubits or set(key) - {"0", "1"}:
            raise FormatError(f"{path}: bad bitstring key {key!r}")
        weights[int(key, 2)] = value
    if shots > 0 and int(weights.sum()) != shots:
        raise FormatError(f"{path}: counts do not sum to shots={shots}")
    return weights, n_qubits, shots


def _dump_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


# -- voxel grids -------------------------------------------------------------

def _sidecar(path) -> str:
    return os.fspath(path) + ".json"


def write_grid(path, grid) -> None:
    """Write a cubic grid (GQV1) plus a JSON metadata sidecar."""
    densities = np.asarray(grid.densities, dtype=np.float64)
    if densities.ndim != 3:
        raise DomainError(f"grid files hold 3-D grids, got shape {densities.shape}")
    with open(path, "wb") as handle:
        handle.write(GRID_MAGIC)
        handle.write(struct.pack("<III", *densities.shape))
        handle.write(np.ascontiguousarray(densities, dtype="<f8").tobytes())
    meta = {"normalization": None}
    if grid.normalization is not None:
        meta["normalization"] = {
            "scheme": grid.normalization.scheme.key,
            "scale": grid.normalization.scale,
        }
    _dump_json(_sidecar(path), meta)


def read_grid(path):
    from .cosmicweb import NormalizationInfo, VoxelGrid, scheme_by_name

    with open(path, "rb") as handle:
        blob = handle.read()
    if blob[:4] != GRID_MAGIC:
        raise FormatError(f"{path}: not a voxel-grid file (bad magic)")
    dims = struct.unpack("<III", blob[4:16])
    expected = 16 + int(np.prod(dims)) * 8
    if len(blob) != expected:
        raise FormatError(f"{path}: truncated voxel-grid file")
    densities = np.frombuffer(blob[16:], dtype="<f8").astype(np.float64).reshape(dims)
    normalization = None
    sidecar = _sidecar(path)
    if os.path.exists(sidecar):
        with open(sidecar, "r", encoding="utf-8") as handle:
            meta = json.load(handle)
        entry = meta.get("normalization")
        if entry:
            normalization = NormalizationInfo(
                scheme=scheme_by_name(entry["scheme"]), scale=float(entry["scale"])
            )
    return VoxelGrid(densities=densities, normalization=normalization)


# -- point clouds ------------------------------------------------------------

def write_points(path, cloud, binary: bool = False) -> None:
    points = np.asarray(cloud.points, dtype=np.float64)
    if binary:
        with open(path, "wb") as handle:
            handle.write(POINTS_MAGIC)
            handle.write(np.ascontiguousarray(points, dtype="<f4").tobytes())
    else:
        with open(path, "w", encoding="utf-8") as handle:
            for x, y, z in points:
                handle.write(f"{x!r} {y!r} {z!r}\n")
    _dump_json(_sidecar(path), {"box_size": float(cloud.box_size)})


def read_points(path, box_size: float | None = None):
    """Read ASCII ``x y z`` lines or a GQP1 binary; box size comes from the
    explicit argument or the ``<path>.json`` sidecar."""
    from .cosmicweb import PointCloud

    with open(path, "rb") as handle:
        head = handle.read(4)
    if head == POINTS_MAGIC:
        with open(path, "rb") as handle:
            blob = handle.read()
        body = blob[4:]
        if len(body) % 12 != 0:
            raise FormatError(f"{path}: binary point payload is not f32 triplets")
        points = np.frombuffer(body, dtype="<f4").astype(np.float64).reshape(-1, 3)
    else:
        try:
            raw = np.loadtxt(path, dtype=np.float64, ndmin=2)
        except ValueError as exc:
            raise FormatError(f"{path}: bad ASCII point file ({exc})") from None
        if raw.size == 0:
            raise FormatError(f"{path}: empty point file")
        if raw.shape[1] != 3:
            raise FormatError(f"{path}: expected 3 columns, got {raw.shape[1]}")
        points = raw
    if box_size is None:
        sidecar = _sidecar(path)
        if not os.path.exists(sidecar):
            raise FormatError(
                f"{path}: box size not given and sidecar {sidecar} is missing"
            )
        with open(sidecar, "r", encoding="utf-8") as handle:
            box_size = float(json.load(handle)["box_size"])
    return PointCloud(points=points, box_size=float(box_size))
