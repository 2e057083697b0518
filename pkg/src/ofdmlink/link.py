"""End-to-end baseband link: bits -> symbols -> OFDM -> channel -> bits.

No pilots and no equalizer. Coherent schemes over a fading channel are
demapped as received, so their error rate shows the raw channel damage.
DPSK recovers the data from phase differences instead.
"""
from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .channel import (
    ChannelSpec,
    FadingState,
    apply_flat_fading,
    awgn,
    ebn0_to_noise_variance,
    rician_gains,
)
from .mapping import (
    ConfigError,
    Constellation,
    Mapping,
    Scheme,
    build_constellation,
    demap_hard,
    diff_decode,
    diff_encode,
    map_bits,
)
from .ofdm import OfdmConfig, ofdm_demodulate, ofdm_modulate
from .rng import Streams, make_streams

__all__ = [
    "LinkConfig",
    "TransmissionResult",
    "run_block",
    "constellation_capture",
]

log = logging.getLogger(__name__)

DIFF_AXES = ("time", "frequency")


@dataclass(frozen=True)
class LinkConfig:
    """Everything one transmission needs.

    ``symbols_per_block`` is the number of data-carrying OFDM symbols per
    block. Each block gets its own fading realisation and, for DPSK, its own
    reference symbol, so it is also the differential chain length.
    """

    scheme: Scheme = Scheme.QAM
    order: int = 16
    mapping: Mapping = Mapping.GRAY
    ofdm: OfdmConfig = field(default_factory=OfdmConfig)
    channel: ChannelSpec = field(default_factory=ChannelSpec)
    ebn0_db: float = 10.0
    count_cp_energy: bool = True
    diff_axis: str = "time"
    symbols_per_block: int = 8

    def __post_init__(self) -> None:
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "mapping", Mapping(self.mapping))
        if self.diff_axis not in DIFF_AXES:
            raise ConfigError(f"diff_axis must be one of {DIFF_AXES}, got {self.diff_axis!r}")
        if self.symbols_per_block < 1:
            raise ConfigError("symbols_per_block must be >= 1")
        if not math.isclose(self.ofdm.sample_period, self.channel.sample_period):
            raise ConfigError("ofdm.sample_period and channel.sample_period differ")
        build_constellation(self.scheme, self.order, self.mapping)

    @functools.cached_property
    def constellation(self) -> Constellation:
        return build_constellation(self.scheme, self.order, self.mapping)

    @property
    def bits_per_symbol(self) -> int:
        return self.constellation.bits_per_symbol

    @property
    def data_subcarriers(self) -> int:
        """Data symbols per OFDM symbol; frequency-axis DPSK spends bin 0 on the reference."""
        n = self.ofdm.n_subcarriers
        if self.scheme.differential and self.diff_axis == "frequency":
            return n - 1
        return n

    @property
    def bits_per_ofdm_symbol(self) -> int:
        return self.data_subcarriers * self.bits_per_symbol

    @property
    def bits_per_block(self) -> int:
        return self.symbols_per_block * self.bits_per_ofdm_symbol

    @property
    def noise_variance(self) -> float:
        return ebn0_to_noise_variance(
            self.ebn0_db, self.bits_per_symbol, self.ofdm, self.count_cp_energy
        )


@dataclass
class TransmissionResult:
    bits_sent: int
    bit_errors: int
    tx_symbols: np.ndarray | None = None
    rx_symbols: np.ndarray | None = None


@functools.lru_cache(maxsize=64)
def _note_regime(cfg: LinkConfig) -> None:
    if cfg.channel.fading and not cfg.scheme.differential:
        log.warning(
            "%s over %s fading runs without pilots or equalization; "
            "expect an uncompensated error floor",
            cfg.constellation.name,
            cfg.channel.family.value,
        )


def _to_grid(info: np.ndarray, cfg: LinkConfig) -> np.ndarray:
    """Lay information symbols out on the (ofdm symbol, subcarrier) grid."""
    if not cfg.scheme.differential:
        return info
    if cfg.diff_axis == "time":
        ref = np.ones((1, info.shape[1]), dtype=np.complex128)
        return np.concatenate((ref, diff_encode(info, axis=0)), axis=0)
    ref = np.ones((info.shape[0], 1), dtype=np.complex128)
    return np.concatenate((ref, diff_encode(info, axis=1)), axis=1)


def _from_grid(rx: np.ndarray, cfg: LinkConfig) -> np.ndarray:
    """Decision variables matching ``info`` from the received grid."""
    if not cfg.scheme.differential:
        return rx
    if cfg.diff_axis == "time":
        return diff_decode(rx, axis=0)[1:]
    return diff_decode(rx, axis=1)[:, 1:]


def _channel(x: np.ndarray, cfg: LinkConfig, rng: Streams) -> np.ndarray:
    spec = cfg.channel
    if spec.fading:
        state = FadingState.create(spec.doppler_hz, spec.sample_period, rng.fading)
        x = apply_flat_fading(x, rician_gains(state, spec.los_k_factor, x.size))
    return awgn(x, cfg.noise_variance, rng.noise)


def _transmit(cfg: LinkConfig, bits: np.ndarray, rng: Streams):
    const = cfg.constellation
    info = map_bits(bits, const).reshape(-1, cfg.data_subcarriers)
    grid = _to_grid(info, cfg)
    frames = ofdm_modulate(grid.ravel(), cfg.ofdm)
    received = _channel(frames.ravel(), cfg, rng)
    rx_grid = ofdm_demodulate(received, cfg.ofdm).reshape(grid.shape)
    return grid, rx_grid, _from_grid(rx_grid, cfg)


def run_block(cfg: LinkConfig, n_bits: int, rng, keep_symbols: bool = False) -> TransmissionResult:
    """Send ``n_bits`` random bits through the full chain and count bit errors.

    ``n_bits`` must fill whole OFDM symbols. ``rng`` is a :class:`Streams`
    or anything :func:`make_streams` accepts. DPSK reference symbols are
    sent on top of ``n_bits`` and are not counted.
    """
    rng = make_streams(rng)
    per_symbol = cfg.bits_per_ofdm_symbol
    if n_bits <= 0 or n_bits % per_symbol:
        raise ValueError(f"n_bits={n_bits} must be a positive multiple of {per_symbol}")
    _note_regime(cfg)
    bits = rng.bits.integers(0, 2, n_bits, dtype=np.uint8)
    grid, rx_grid, decisions = _transmit(cfg, bits, rng)
    decoded = demap_hard(decisions.ravel(), cfg.constellation)
    errors = int(np.count_nonzero(decoded != bits))
    result = TransmissionResult(bits_sent=n_bits, bit_errors=errors)
    if keep_symbols:
        result.tx_symbols = grid.ravel()
        result.rx_symbols = rx_grid.ravel()
    return result


def constellation_capture(cfg: LinkConfig, n_symbols: int, rng) -> np.ndarray:
    """Received post-FFT symbols, before any decision, for scatter plots.

    For DPSK these are the raw received points; reference symbols are left out.
    """
    if n_symbols < 1:
        raise ValueError("n_symbols must be >= 1")
    rng = make_streams(rng)
    n_ofdm = -(-n_symbols // cfg.data_subcarriers)
    bits = rng.bits.integers(0, 2, n_ofdm * cfg.bits_per_ofdm_symbol, dtype=np.uint8)
    _, rx_grid, _ = _transmit(cfg, bits, rng)
    if cfg.scheme.differential:
        rx_grid = rx_grid[1:] if cfg.diff_axis == "time" else rx_grid[:, 1:]
    return rx_grid.ravel()[:n_symbols]
