"""The encoding-model abstraction: position/value maps assembled into a state.

A model bundles a position map ``xi`` (injective, pixel coordinates to a
basis index), a value map ``delta`` (channel values to a value-register
state, or a bare amplitude when the value register is empty), and a
retrieval procedure from measurement weights.  The assembled state is

    (1 / sqrt(prod(dims))) * sum_coords sum_layers delta (x) xi

with coordinates ranging over the power-of-two padded grid; out-of-range
coordinates contribute zero by construction of ``delta``, so exactly
``prod(dims)`` terms survive.

Register layout (fixed package-wide): the value register occupies the most
significant qubits, any auxiliary register sits in the middle, and the
position register is least significant.  The position index is the
row-major flattening of the coordinates over the padded extents.
"""

from __future__ import annotations

import itertools
import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, DomainError, FormatError, ModelError
from .rng import generator
from .simcore import StateVector, measure_probabilities

VALUE_ATOL = 1e-12
ASSEMBLY_NORM_ATOL = 1e-9
UNITARY_ATOL = 1e-10


@dataclass(frozen=True)
class ImageArray:
    """A d-dimensional image: per-channel values in [0, 1].

    ``values`` always carries an explicit trailing channel axis, i.e. its
    shape is ``dims + (channels,)``.
    """

    values: np.ndarray
    bit_depth: int = 8

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        if vals.ndim < 2:
            raise DomainError("image values need at least one axis plus channels")
        if np.min(vals) < -VALUE_ATOL or np.max(vals) > 1.0 + VALUE_ATOL:
            raise DomainError("image values must lie in [0, 1]")
        object.__setattr__(self, "values", np.clip(vals, 0.0, 1.0))

    @property
    def dims(self) -> tuple:
        return self.values.shape[:-1]

    @property
    def channels(self) -> int:
        return self.values.shape[-1]

    @classmethod
    def grayscale(cls, array, bit_depth: int = 8) -> "ImageArray":
        arr = np.asarray(array, dtype=np.float64)
        return cls(arr[..., np.newaxis], bit_depth)

    @classmethod
    def rgb(cls, array, bit_depth: int = 8) -> "ImageArray":
        arr = np.asarray(array, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[-1] != 3:
            raise DomainError(f"an RGB image needs shape (H, W, 3), got {arr.shape}")
        return cls(arr, bit_depth)

    @classmethod
    def volumetric(cls, array, bit_depth: int = 8) -> "ImageArray":
        return cls.grayscale(array, bit_depth)


def padded_extents(dims) -> tuple:
    """Round each extent up to the next power of two."""
    out = []
    for extent in dims:
        extent = int(extent)
        if extent < 1:
            raise DomainError(f"extents must be >= 1, got {extent}")
        out.append(1 << max(extent - 1, 0).bit_length() if extent > 1 else 1)
    return tuple(out)


def position_qubits(dims) -> int:
    return int(sum(p.bit_length() - 1 for p in padded_extents(dims)))


def row_major_index(coord, dims) -> int:
    """Row-major position of ``coord`` on the padded grid of ``dims``."""
    padded = padded_extents(dims)
    index = 0
    for c, extent in zip(coord, padded):
        index = index * extent + int(c)
    return index


@dataclass(frozen=True)
class EncodingModel:
    """A concrete encoding: value/position maps bound to image extents.

    ``delta(k, l, coord, channel_values)`` returns a complex vector of
    length ``2^value_qubits`` (or a bare complex amplitude when
    ``value_qubits == 0``); it must return zeros for coordinates outside
    ``dims``.  ``xi(k, l, coord)`` returns the basis index on the combined
    auxiliary+position register and must be injective per (k, l).
    ``retrieve(weights, dims)`` decodes a dense non-negative weight vector
    (counts or probabilities) back into an image.
    """

    name: str
    dims: tuple
    channels: int
    value_qubits: int
    delta: object
    xi: object
    retrieve: object
    components: int = 1
    layers: int = 1
    extra_qubits: int = 0
    canonical: object = None
    verify_tolerance: float = 1e-9

    @property
    def position_register(self) -> int:
        return position_qubits(self.dims)

    @property
    def total_qubits(self) -> int:
        return self.value_qubits + self.extra_qubits + self.position_register


def assemble_state(model: EncodingModel, image: ImageArray, component: int = 0,
                   max_qubits: int | None = None) -> StateVector:
    """Assemble the encoded state for one component of ``model``.

    Raises :class:`CapacityError` when the qubit budget exceeds
    ``max_qubits`` and :class:`ModelError` when the maps do not produce a
    normalizable state (e.g. a value map of the wrong norm).
    """
    if image.dims != tuple(model.dims):
        raise DomainError(f"image dims {image.dims} do not match model dims {model.dims}")
    if image.channels != model.channels:
        raise DomainError(
            f"image has {image.channels} channels, model expects {model.channels}"
        )
    if not 0 <= component < model.components:
        raise DomainError(f"component {component} out of range (K={model.components})")
    total = model.total_qubits
    if max_qubits is not None and total > max_qubits:
        raise CapacityError(total, max_qubits)

    side_qubits = model.extra_qubits + model.position_register
    side_dim = 1 << side_qubits
    n_pixels = int(np.prod(model.dims))

    if model.value_qubits == 0:
        # Amplitude-encoding limiting case: delta yields a bare amplitude and
        # the state is normalized by the image's L2 norm, not sqrt(n_pixels).
        amps = np.zeros(side_dim, dtype=np.complex128)
        for coord in itertools.product(*(range(d) for d in model.dims)):
            pixel = image.values[coord]
            for layer in range(model.layers):
                value = complex(model.delta(component, layer, coord, pixel))
                amps[_checked_side_index(model, component, layer, coord, side_dim)] += value
        norm = np.linalg.norm(amps)
        if norm <= 0.0:
            raise ModelError("amplitude encoding of an all-zero image is degenerate")
        return StateVector(max(side_qubits, 1), amps / norm)

    value_dim = 1 << model.value_qubits
    table = np.zeros((value_dim, side_dim), dtype=np.complex128)
    for coord in itertools.product(*(range(d) for d in model.dims)):
        pixel = image.values[coord]
        for layer in range(model.layers):
            value = np.asarray(model.delta(component, layer, coord, pixel),
                               dtype=np.complex128)
            if value.shape != (value_dim,):
                raise ModelError(
                    f"{model.name}: delta returned shape {value.shape}, "
                    f"expected ({value_dim},)"
                )
            table[:, _checked_side_index(model, component, layer, coord, side_dim)] += value
    amps = table.reshape(-1) / np.sqrt(n_pixels)
    norm = np.linalg.norm(amps)
    if abs(norm - 1.0) > ASSEMBLY_NORM_ATOL:
        raise ModelError(
            f"{model.name}: assembled state has norm {norm!r}; the value map "
            "does not normalize"
        )
    return StateVector(total, amps / norm)


def _checked_side_index(model, component, layer, coord, side_dim) -> int:
    index = int(model.xi(component, layer, coord))
    if not 0 <= index < side_dim:
        raise ModelError(
            f"{model.name}: xi({coord}) = {index} outside the "
            f"{side_dim}-dimensional position register"
        )
    return index


def completion_unitary(state: StateVector):
    """A unitary whose first column is ``state`` (Householder completion).

    Uses the reflector ``H = I - 2 w w^H / |w|^2`` with ``w = v - alpha e0``
    and ``alpha = -v0/|v0|`` (or ``-1`` when ``v0 = 0``), then fixes the
    column phase so that ``U e0 = v`` exactly.  Deterministic and O(4^n).
    """
    v = state.amplitudes
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > 1e-9:
        raise DomainError("completion requires a normalized state")
    dim = v.size
    alpha = -v[0] / abs(v[0]) if abs(v[0]) > 0.0 else -1.0 + 0.0j
    w = v.copy()
    w[0] -= alpha
    # |w|^2 = 2 + 2|v0| >= 2 with this sign choice, so no cancellation guard
    wnorm_sq = np.real(np.vdot(w, w))
    entries = np.eye(dim, dtype=np.complex128) - (2.0 / wnorm_sq) * np.outer(w, w.conj())
    entries[:, 0] *= alpha
    entries[:, 0] = v  # exact first column; rounding error stays in U^H U checks
    return UnitaryMatrix(state.n_qubits, entries)


@dataclass(frozen=True)
class UnitaryMatrix:
    """A 2^n x 2^n unitary; full unitarity is verified for n <= 8."""

    n_qubits: int
    entries: np.ndarray

    def __post_init__(self):
        ent = np.ascontiguousarray(self.entries, dtype=np.complex128)
        object.__setattr__(self, "entries", ent)
        dim = 1 << self.n_qubits
        if ent.shape != (dim, dim):
            raise DomainError(f"expected a {dim}x{dim} matrix, got {ent.shape}")
        if self.n_qubits <= 8:
            gram = ent.conj().T @ ent
            if np.max(np.abs(gram - np.eye(dim))) > UNITARY_ATOL:
                raise DomainError("matrix is not unitary within tolerance")


# ---------------------------------------------------------------------------
# unitary export (external interface)

UNITARY_MAGIC = b"GQU1"


def write_unitary(path, unitary: UnitaryMatrix) -> None:
    """Binary export: 16-byte header (magic, u32 n_qubits, u64 reserved)
    followed by row-major little-endian (re, im) float64 pairs."""
    with open(path, "wb") as handle:
        handle.write(UNITARY_MAGIC)
        handle.write(struct.pack("<IQ", unitary.n_qubits, 0))
        handle.write(np.ascontiguousarray(unitary.entries, dtype="<c16").tobytes())


def read_unitary(path) -> UnitaryMatrix:
    with open(path, "rb") as handle:
        blob = handle.read()
    if blob[:4] != UNITARY_MAGIC:
        raise FormatError(f"{path}: not a unitary file (bad magic)")
    n_qubits, _reserved = struct.unpack("<IQ", blob[4:16])
    dim = 1 << n_qubits
    expected = 16 + dim * dim * 16
    if len(blob) != expected:
        raise FormatError(f"{path}: truncated unitary file")
    entries = np.frombuffer(blob[16:], dtype="<c16").reshape(dim, dim)
    return UnitaryMatrix(n_qubits, entries.astype(np.complex128))


def write_unitary_json(path, unitary: UnitaryMatrix) -> None:
    """Human-readable export, restricted to n <= 4 (the matrix is 4^n entries)."""
    if unitary.n_qubits > 4:
        raise DomainError("JSON unitary export is limited to 4 qubits")
    entries = [
        [[float(z.real), float(z.imag)] for z in row] for row in unitary.entries
    ]
    with open(path, "w", encoding="utf-8") as handle:
        json.dump({"n_qubits": unitary.n_qubits, "entries": entries}, handle)


# ---------------------------------------------------------------------------
# model verification


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class VerificationReport:
    model: str
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def summary(self) -> str:
        lines = [f"model {self.model}: {'PASS' if self.passed else 'FAIL'}"]
        for check in self.checks:
            status = "ok" if check.passed else "FAIL"
            detail = f" ({check.detail})" if check.detail else ""
            lines.append(f"  [{status}] {check.name}{detail}")
        return "\n".join(lines)


def verify_model(model: EncodingModel, dims=None, seed: int = 0) -> VerificationReport:
    """Run the automated model checks; failures land in the report, not raises.

    Checks: xi injectivity (exhaustive over the padded grid, per component
    and layer), delta vanishing out of range, unit norm of the assembled
    state on a random image, and an exact-probability round trip against
    the model's canonical projection of that image.
    """
    if dims is not None and tuple(dims) != tuple(model.dims):
        raise DomainError(f"model is bound to dims {model.dims}, not {tuple(dims)}")
    checks = []
    padded = padded_extents(model.dims)
    side_dim = 1 << (model.extra_qubits + model.position_register)

    collisions = []
    out_of_range = []
    for k in range(model.components):
        for layer in range(model.layers):
            seen = {}
            for coord in itertools.product(*(range(p) for p in padded)):
                index = int(model.xi(k, layer, coord))
                if not 0 <= index < side_dim:
                    out_of_range.append((k, layer, coord, index))
                elif index in seen:
                    collisions.append((k, layer, seen[index], coord))
                else:
                    seen[index] = coord
    detail = ""
    if collisions:
        k, layer, first, second = collisions[0]
        detail = f"xi({first}) == xi({second}) at k={k}, l={layer}"
    elif out_of_range:
        k, layer, coord, index = out_of_range[0]
        detail = f"xi({coord}) = {index} out of register range"
    checks.append(CheckResult("xi-injective", not collisions and not out_of_range, detail))

    probe = generator(seed).random(model.channels)
    bad_coord = None
    for axis in range(len(model.dims)):
        if padded[axis] > model.dims[axis]:
            coord = tuple(model.dims[a] if a == axis else 0 for a in range(len(model.dims)))
            bad_coord = coord
            break
    if bad_coord is None:
        bad_coord = tuple(model.dims)  # just past the corner of the true grid
    zero_ok = True
    for k in range(model.components):
        for layer in range(model.layers):
            value = model.delta(k, layer, bad_coord, probe)
            magnitude = abs(complex(value)) if model.value_qubits == 0 else float(
                np.max(np.abs(np.asarray(value)))
            )
            if magnitude > VALUE_ATOL:
                zero_ok = False
    checks.append(CheckResult(
        "delta-out-of-range-zero", zero_ok,
        "" if zero_ok else f"delta({bad_coord}) is nonzero",
    ))

    image = ImageArray(generator(seed).random(tuple(model.dims) + (model.channels,)))
    try:
        state = assemble_state(model, image)
        norm_sq = float(np.sum(np.abs(state.amplitudes) ** 2))
        checks.append(CheckResult("assembled-norm", abs(norm_sq - 1.0) <= 1e-10,
                                  f"sum |a|^2 = {norm_sq!r}"))
    except Exception as exc:  # report, do not raise
        checks.append(CheckResult("assembled-norm", False, str(exc)))
        return VerificationReport(model.name, tuple(checks))

    reference = model.canonical(image) if model.canonical is not None else image
    retrieved = model.retrieve(measure_probabilities(state), model.dims)
    error = float(np.max(np.abs(retrieved.values - reference.values)))
    checks.append(CheckResult(
        "exact-roundtrip", error <= model.verify_tolerance,
        f"max |error| = {error:.3e} (tol {model.verify_tolerance:.1e})",
    ))
    return VerificationReport(model.name, tuple(checks))
