"""Storage fault injection for application data held in memory cells.

Single-level cells flip stored bits independently at a given error rate;
multi-level cells resample each cell's programmed level from a row-stochastic
transition matrix (levels map to payload bits through Gray or plain binary
coding).  Randomness is counter-based -- a hash of (seed, cell index) -- so a
given (payload, model, seed) triple corrupts identically byte for byte, no
matter how cells are chunked or parallelized.

Accuracy scoring is adapter-based: a mean-squared-error adapter for generic
tensors, and a bundled 10-class / 64-feature linear classifier with a fixed
evaluation set for an end-to-end application metric.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

GRAY = "gray"
BINARY = "binary"

MSE_ADAPTER = "mse"
CLASSIFIER_ADAPTER = "tiny_linear_classifier"

_U64 = np.uint64


class FaultError(ValueError):
    pass


def _splitmix64(x: np.ndarray) -> np.ndarray:
    # Finalizer of the splitmix64 generator; good 64-bit avalanche.
    x = (x + _U64(0x9E3779B97F4A7C15)) & _U64(0xFFFFFFFFFFFFFFFF)
    x = (x ^ (x >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> _U64(27))) * _U64(0x94D049BB133111EB)
    return x ^ (x >> _U64(31))


def unit_uniforms(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """uniform[0,1) draws keyed by (seed, index); order-independent."""
    with np.errstate(over="ignore"):
        idx = np.arange(offset, offset + count, dtype=np.uint64)
        seed_key = _splitmix64(np.asarray([seed & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64))[0]
        z = _splitmix64(idx * _U64(0xD1B54A32D192ED03) + seed_key)
    return (z >> _U64(11)).astype(np.float64) * (1.0 / (1 << 53))


@dataclass(frozen=True)
class FaultModel:
    """SLC bit-error or MLC level-transition fault parameterization."""

    kind: str  # "slc" | "mlc"
    ber: float | None = None
    levels: int | None = None
    transition: tuple[tuple[float, ...], ...] | None = None

    def __post_init__(self):
        if self.kind == "slc":
            if self.ber is None or not 0.0 <= self.ber <= 1.0:
                raise FaultError(f"SLC bit error rate must be in [0, 1], got {self.ber}")
        elif self.kind == "mlc":
            if self.levels is None or self.levels < 2 or (self.levels & (self.levels - 1)):
                raise FaultError("MLC level count must be a power of two >= 2")
            if self.transition is None or len(self.transition) != self.levels:
                raise FaultError("transition matrix must be levels x levels")
            for i, row in enumerate(self.transition):
                if len(row) != self.levels:
                    raise FaultError("transition matrix must be levels x levels")
                if any(p < 0 for p in row):
                    raise FaultError(f"transition row {i} has a negative entry")
                if abs(sum(row) - 1.0) > 1e-12:
                    raise FaultError(f"transition row {i} does not sum to 1")
        else:
            raise FaultError(f"unknown fault model kind {self.kind!r}")

    @classmethod
    def slc(cls, ber: float) -> "FaultModel":
        return cls(kind="slc", ber=ber)

    @classmethod
    def mlc(cls, transition) -> "FaultModel":
        rows = tuple(tuple(float(p) for p in row) for row in transition)
        return cls(kind="mlc", levels=len(rows), transition=rows)


def adjacent_level_model(levels: int, q: float) -> FaultModel:
    """Tridiagonal MLC model: each neighbor reached with probability q.

    Interior levels move either way with probability q each and stay with
    1-2q; boundary levels move inward with q and stay with 1-q.
    """
    if q < 0 or q > 0.5:
        raise FaultError(f"adjacent-level q must be in [0, 0.5], got {q}")
    matrix = []
    for level in range(levels):
        row = [0.0] * levels
        if level == 0:
            row[0], row[1] = 1.0 - q, q
        elif level == levels - 1:
            row[level], row[level - 1] = 1.0 - q, q
        else:
            row[level - 1] = q
            row[level + 1] = q
            row[level] = 1.0 - 2.0 * q
        matrix.append(row)
    return FaultModel.mlc(matrix)


@dataclass(frozen=True)
class StoredTensor:
    """Application payload as stored: raw bytes plus the cell encoding."""

    payload: bytes
    bits_per_cell: int = 1
    level_coding: str = GRAY
    quantization: dict | None = None  # {"scale", "zero_point", "element_bits"}

    def __post_init__(self):
        if self.bits_per_cell < 1:
            raise FaultError("bits_per_cell must be >= 1")
        if (len(self.payload) * 8) % self.bits_per_cell:
            raise FaultError(
                f"payload of {len(self.payload)} bytes does not chunk into "
                f"{self.bits_per_cell}-bit cells"
            )
        if self.level_coding not in (GRAY, BINARY):
            raise FaultError(f"unknown level coding {self.level_coding!r}")


@dataclass(frozen=True)
class InjectionResult:
    corrupted: bytes
    bit_error_rate: float
    cell_error_rate: float
    seed: int


def _binary_to_gray(levels: np.ndarray) -> np.ndarray:
    return levels ^ (levels >> 1)


def _gray_to_binary(codes: np.ndarray) -> np.ndarray:
    out = codes.copy()
    shift = 1
    while shift < 32:
        out ^= out >> shift
        shift <<= 1
    return out


def inject(data: StoredTensor, model: FaultModel, seed: int) -> InjectionResult:
    """Corrupt a stored tensor under the fault model. Deterministic per seed."""
    bits = np.unpackbits(np.frombuffer(data.payload, dtype=np.uint8))
    if model.kind == "slc":
        if data.bits_per_cell != 1:
            raise FaultError("SLC faults need a 1-bit-per-cell tensor")
        flips = unit_uniforms(seed, bits.size) < model.ber
        corrupted_bits = bits ^ flips.astype(np.uint8)
        error_rate = float(np.mean(corrupted_bits != bits)) if bits.size else 0.0
        payload = np.packbits(corrupted_bits).tobytes()
        return InjectionResult(payload, error_rate, error_rate, seed)

    if model.levels != 1 << data.bits_per_cell:
        raise FaultError(
            f"model has {model.levels} levels but tensor stores "
            f"{data.bits_per_cell} bits per cell"
        )
    groups = bits.reshape(-1, data.bits_per_cell)
    weights = 1 << np.arange(data.bits_per_cell - 1, -1, -1, dtype=np.int64)
    codes = (groups.astype(np.int64) * weights).sum(axis=1)
    levels = _gray_to_binary(codes) if data.level_coding == GRAY else codes

    cum = np.cumsum(np.asarray(model.transition, dtype=np.float64), axis=1)
    cum[:, -1] = 1.0
    draws = unit_uniforms(seed, levels.size)
    new_levels = np.empty_like(levels)
    for level in np.unique(levels):
        mask = levels == level
        new_levels[mask] = np.searchsorted(cum[level], draws[mask], side="right")
    np.clip(new_levels, 0, model.levels - 1, out=new_levels)

    new_codes = _binary_to_gray(new_levels) if data.level_coding == GRAY else new_levels
    new_bits = ((new_codes[:, None] & weights) > 0).astype(np.uint8).reshape(-1)
    cell_errors = float(np.mean(new_levels != levels)) if levels.size else 0.0
    bit_errors = float(np.mean(new_bits != bits)) if bits.size else 0.0
    payload = np.packbits(new_bits).tobytes()
    return InjectionResult(payload, bit_errors, cell_errors, seed)


# --- accuracy adapters -----------------------------------------------------


def _sidecar_path(payload_path: Path) -> Path:
    return payload_path.with_suffix(".json")


def load_quantized(path) -> tuple[bytes, dict]:
    path = Path(path)
    payload = path.read_bytes()
    meta = json.loads(_sidecar_path(path).read_text())
    expected = int(np.prod(meta["shape"])) * meta.get("element_bits", 8) // 8
    if len(payload) != expected:
        raise FaultError(
            f"{path}: payload is {len(payload)} bytes, sidecar shape needs {expected}"
        )
    return payload, meta


def dequantize(payload: bytes, meta: dict) -> np.ndarray:
    if meta.get("element_bits", 8) != 8:
        raise FaultError("only 8-bit quantized payloads are supported")
    raw = np.frombuffer(payload, dtype=np.int8).astype(np.float64)
    values = (raw - meta["zero_point"]) * meta["scale"]
    return values.reshape(meta["shape"])


def _load_array(path: Path, dtype) -> np.ndarray:
    meta = json.loads(_sidecar_path(path).read_text())
    arr = np.frombuffer(path.read_bytes(), dtype=dtype)
    return arr.reshape(meta["shape"])


def evaluate_accuracy(weights_file, result: InjectionResult, adapter: str) -> float:
    """Score corrupted weights: MSE against the originals, or classifier top-1.

    The classifier adapter expects ``eval_inputs.bin`` / ``labels.bin`` (with
    JSON sidecars) next to the weights file; accuracy is top-1 agreement with
    the ground-truth labels when scoring with the corrupted weights.
    """
    weights_file = Path(weights_file)
    original, meta = load_quantized(weights_file)
    if len(result.corrupted) != len(original):
        raise FaultError(
            f"corrupted payload is {len(result.corrupted)} bytes, "
            f"weights file has {len(original)}"
        )
    if adapter == MSE_ADAPTER:
        clean = dequantize(original, meta)
        dirty = dequantize(result.corrupted, meta)
        return float(np.mean((clean - dirty) ** 2))
    if adapter == CLASSIFIER_ADAPTER:
        weights = dequantize(result.corrupted, meta)
        if weights.ndim != 2:
            raise FaultError("classifier weights must be 2-D (classes x features)")
        inputs = _load_array(weights_file.parent / "eval_inputs.bin", np.float32)
        labels = _load_array(weights_file.parent / "labels.bin", np.uint8)
        if inputs.shape[1] != weights.shape[1]:
            raise FaultError(
                f"weights expect {weights.shape[1]} features, "
                f"eval inputs carry {inputs.shape[1]}"
            )
        scores = inputs.astype(np.float64) @ weights.T
        predictions = np.argmax(scores, axis=1)
        return float(np.mean(predictions == labels))
    raise FaultError(f"unknown accuracy adapter {adapter!r}")


def accuracy_filter(rows: list, floor: float) -> list:
    """Rows whose accuracy is absent or at least the floor; order preserved."""
    return [row for row in rows if row.accuracy is None or row.accuracy >= floor]


def classifier_clean_accuracy(weights_file) -> float:
    """Accuracy of the uncorrupted bundled classifier (golden-value helper)."""
    payload, _ = load_quantized(weights_file)
    pristine = InjectionResult(payload, 0.0, 0.0, seed=0)
    return evaluate_accuracy(weights_file, pristine, CLASSIFIER_ADAPTER)
