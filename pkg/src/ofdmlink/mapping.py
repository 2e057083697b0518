"""Constellations for M-QAM, M-PSK and M-DPSK, bit mapping and hard demapping.

Every constellation is normalised to unit average symbol energy. Bit labels
are integers whose binary expansion (MSB first) is the bit group carried by
the point.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Scheme",
    "Mapping",
    "Constellation",
    "ConfigError",
    "gray_encode",
    "gray_decode",
    "build_constellation",
    "map_bits",
    "demap_hard",
    "diff_encode",
    "diff_decode",
]

QAM_ORDERS = (2, 4, 16, 64, 256)
MAX_ORDER = 256

_UNIT_TOL = 1e-9
# Bound on the (symbols x points) distance matrix built per demapping chunk.
_DEMAP_CHUNK_ELEMS = 1 << 21


class ConfigError(ValueError):
    """Raised for parameter combinations the simulator does not support."""


class Scheme(str, enum.Enum):
    QAM = "qam"
    PSK = "psk"
    DPSK = "dpsk"

    @property
    def differential(self) -> bool:
        return self is Scheme.DPSK


class Mapping(str, enum.Enum):
    GRAY = "gray"
    NATURAL = "natural"


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _check_index(n: int, order: int | None) -> int:
    n = int(n)
    if n < 0 or (order is not None and n >= order):
        raise ValueError(f"index {n} out of range for order {order}")
    return n


def gray_encode(n: int, order: int | None = None) -> int:
    """Binary-reflected Gray codeword of ``n``.

    ``order`` is the alphabet size; when given, ``n`` must lie in
    ``[0, order)``.
    """
    n = _check_index(n, order)
    return n ^ (n >> 1)


def gray_decode(g: int, order: int | None = None) -> int:
    """Inverse of :func:`gray_encode`."""
    g = _check_index(g, order)
    n = 0
    while g:
        n ^= g
        g >>= 1
    return n


@dataclass(frozen=True, eq=False)
class Constellation:
    """A finite set of unit-average-energy points, each carrying a bit label.

    ``points[k]`` carries label ``labels[k]``; ``point_of_label[l]`` is the
    inverse lookup used by the mapper.
    """

    scheme: Scheme
    order: int
    points: np.ndarray
    labels: np.ndarray
    mapping: Mapping
    point_of_label: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        points = np.asarray(self.points, dtype=np.complex128)
        labels = np.asarray(self.labels, dtype=np.int64)
        if points.shape != (self.order,) or labels.shape != (self.order,):
            raise ValueError("points and labels must both have `order` entries")
        if sorted(labels.tolist()) != list(range(self.order)):
            raise ValueError("labels must be a permutation of 0..M-1")
        inverse = np.empty(self.order, dtype=np.int64)
        inverse[labels] = np.arange(self.order)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "point_of_label", points[inverse])

    @property
    def bits_per_symbol(self) -> int:
        return self.order.bit_length() - 1

    @property
    def name(self) -> str:
        prefix = {"qam": "QAM", "psk": "PSK", "dpsk": "DPSK"}[self.scheme.value]
        return f"{self.order}-{prefix}-{self.mapping.value}"

    def __repr__(self) -> str:
        return f"Constellation({self.name})"


def _psk_points(order: int, mapping: Mapping) -> tuple[np.ndarray, np.ndarray]:
    k = np.arange(order)
    points = np.exp(2j * np.pi * k / order)
    # exact values on the axes keep BPSK/QPSK free of 1e-16 residue
    points = np.round(points.real, 15) + 1j * np.round(points.imag, 15)
    if mapping is Mapping.GRAY:
        labels = k ^ (k >> 1)
    else:
        labels = k
    return points, labels


def _qam_points(order: int, mapping: Mapping) -> tuple[np.ndarray, np.ndarray]:
    side = math.isqrt(order)
    half = side.bit_length() - 1
    levels = 2.0 * np.arange(side) - (side - 1)
    i_idx, q_idx = np.divmod(np.arange(order), side)
    points = levels[i_idx] + 1j * levels[q_idx]
    points /= np.sqrt(np.mean(np.abs(points) ** 2))
    if mapping is Mapping.GRAY:
        labels = ((i_idx ^ (i_idx >> 1)) << half) | (q_idx ^ (q_idx >> 1))
    else:
        labels = (i_idx << half) | q_idx
    return points, labels


def build_constellation(
    scheme: Scheme | str, order: int, mapping: Mapping | str = Mapping.GRAY
) -> Constellation:
    """Build the ``order``-point constellation for ``scheme``.

    PSK and DPSK use ``order`` points on the unit circle with the zero label
    at angle 0. QAM uses the square grid of side ``sqrt(order)``; ``order=2``
    degenerates to BPSK. QAM labels are the per-axis codes of the in-phase
    column (high bits) and quadrature row (low bits).
    """
    try:
        scheme = Scheme(scheme)
        mapping = Mapping(mapping)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    order = int(order)
    if not _is_power_of_two(order) or order < 2 or order > MAX_ORDER:
        raise ConfigError(f"unsupported order {order} for {scheme.value}")
    if scheme is Scheme.QAM and order not in QAM_ORDERS:
        raise ConfigError(f"QAM order must be one of {QAM_ORDERS}, got {order}")

    if scheme is Scheme.QAM and order > 2:
        points, labels = _qam_points(order, mapping)
    else:
        points, labels = _psk_points(order, mapping)
    return Constellation(scheme, order, points, labels, mapping)


def map_bits(bits, constellation: Constellation) -> np.ndarray:
    """Map a flat bit array onto constellation points, ``log2(M)`` bits each."""
    bits = np.asarray(bits).ravel()
    k = constellation.bits_per_symbol
    if bits.size % k:
        raise ValueError(f"{bits.size} bits is not a multiple of {k} bits/symbol")
    if bits.size and (bits.min() < 0 or bits.max() > 1):
        raise ValueError("bits must be 0 or 1")
    weights = 1 << np.arange(k - 1, -1, -1)
    labels = bits.reshape(-1, k).astype(np.int64) @ weights
    return constellation.point_of_label[labels]


def nearest_points(symbols, constellation: Constellation) -> np.ndarray:
    """Index of the Euclidean-nearest point per symbol (ties go to the lower index)."""
    symbols = np.asarray(symbols, dtype=np.complex128).ravel()
    points = constellation.points
    out = np.empty(symbols.size, dtype=np.int64)
    step = max(1, _DEMAP_CHUNK_ELEMS // points.size)
    for start in range(0, symbols.size, step):
        chunk = symbols[start : start + step, None]
        out[start : start + step] = np.argmin(np.abs(chunk - points) ** 2, axis=1)
    return out


def demap_hard(symbols, constellation: Constellation) -> np.ndarray:
    """Minimum-distance hard decisions, returned as a flat ``uint8`` bit array."""
    labels = constellation.labels[nearest_points(symbols, constellation)]
    shifts = np.arange(constellation.bits_per_symbol - 1, -1, -1)
    return ((labels[:, None] >> shifts) & 1).astype(np.uint8).ravel()


def diff_encode(symbols, reference: complex = 1 + 0j, axis: int = -1) -> np.ndarray:
    """Cumulative phase encoding: ``out[k] = out[k-1] * symbols[k]``.

    ``out[-1]`` is ``reference``, which carries no data. Outputs are
    renormalised to the unit circle so long chains do not drift.
    """
    symbols = np.asarray(symbols, dtype=np.complex128)
    if np.any(np.abs(np.abs(symbols) - 1.0) > _UNIT_TOL):
        raise ValueError("differential encoding needs unit-magnitude symbols")
    if abs(abs(reference) - 1.0) > _UNIT_TOL:
        raise ValueError("reference symbol must lie on the unit circle")
    out = reference * np.cumprod(symbols, axis=axis)
    return out / np.abs(out)


def diff_decode(received, reference: complex = 1 + 0j, axis: int = -1) -> np.ndarray:
    """Differential detection: ``received[k] * conj(received[k-1]) / |received[k-1]|``.

    The predecessor of the first sample is ``reference``; a zero-magnitude
    predecessor is replaced by ``reference`` as well.
    """
    received = np.asarray(received, dtype=np.complex128)
    if received.size == 0:
        return received.copy()
    moved = np.moveaxis(received, axis, -1)
    prev = np.empty_like(moved)
    prev[..., 0] = reference
    prev[..., 1:] = moved[..., :-1]
    mag = np.abs(prev)
    dead = mag == 0
    if np.any(dead):
        prev = np.where(dead, reference, prev)
        mag = np.where(dead, abs(reference), mag)
    out = moved * np.conj(prev) / mag
    return np.moveaxis(out, -1, axis)
