"""Channel impairments: calibrated AWGN and flat Rayleigh/Rician fading.

Fading gains come from a sum-of-sinusoids realisation of Clarke's model.
Each quadrature branch sums ``n_oscillators`` cosines at Doppler
frequencies ``fd*cos(alpha_m)`` with angles
``alpha_m = (2*pi*m - pi + theta) / (4*M)`` (one random ``theta`` per
branch) and independent uniform phases. Averaged over ``theta`` and the
phases, the angles cover ``[0, pi/2)`` uniformly, so the autocorrelation
is exactly ``J0(2*pi*fd*tau)``. Within one realisation the frequencies are
distinct and sorted, so time averages converge quickly.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .ofdm import OfdmConfig

__all__ = [
    "Family",
    "ChannelSpec",
    "FadingState",
    "ebn0_to_noise_variance",
    "snr_to_ebn0_db",
    "awgn",
    "fading_gains",
    "rician_gains",
    "apply_flat_fading",
]

DEFAULT_OSCILLATORS = 64
_CHUNK = 1 << 10


class Family(str, enum.Enum):
    AWGN = "awgn"
    RAYLEIGH = "rayleigh"
    RICIAN = "rician"


@dataclass(frozen=True)
class ChannelSpec:
    family: Family = Family.AWGN
    doppler_hz: float = 0.0
    k_factor: float = 0.0
    sample_period: float = 2e-6

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", Family(self.family))
        if self.doppler_hz < 0:
            raise ValueError("doppler_hz must be >= 0")
        if self.k_factor < 0:
            raise ValueError("k_factor must be >= 0")
        if not self.sample_period > 0:
            raise ValueError("sample_period must be positive")
        if self.doppler_hz * self.sample_period >= 0.5:
            raise ValueError(
                f"doppler_hz * sample_period = {self.doppler_hz * self.sample_period:g} "
                "must stay below 0.5"
            )

    @property
    def fading(self) -> bool:
        return self.family is not Family.AWGN

    @property
    def los_k_factor(self) -> float:
        """K-factor actually applied: Rayleigh is Rician with K = 0."""
        return self.k_factor if self.family is Family.RICIAN else 0.0


def _es_over_n0(ebn0_db: float, bits_per_symbol: int, cfg: OfdmConfig,
                count_cp_energy: bool) -> float:
    ratio = 10.0 ** (ebn0_db / 10.0) * bits_per_symbol
    if count_cp_energy:
        ratio /= cfg.cp_overhead
    return ratio


def ebn0_to_noise_variance(
    ebn0_db: float,
    bits_per_symbol: int,
    cfg: OfdmConfig,
    count_cp_energy: bool = True,
) -> float:
    """Complex noise variance per time sample for a unit-power OFDM signal.

    ``Es/N0 = Eb/N0 * bits_per_symbol * N/(N+cp)`` when the prefix energy is
    counted against the bit energy; the returned variance is ``1/(Es/N0)``.
    ``ebn0_db = inf`` gives a noiseless channel.
    """
    if bits_per_symbol < 1:
        raise ValueError("bits_per_symbol must be >= 1")
    if math.isinf(ebn0_db) and ebn0_db > 0:
        return 0.0
    return 1.0 / _es_over_n0(ebn0_db, bits_per_symbol, cfg, count_cp_energy)


def snr_to_ebn0_db(snr_db: float, bits_per_symbol: int, cfg: OfdmConfig,
                   count_cp_energy: bool = True) -> float:
    """Convert per-subcarrier SNR (Es/N0 in dB) to Eb/N0 in dB."""
    factor = bits_per_symbol / (cfg.cp_overhead if count_cp_energy else 1.0)
    return snr_db - 10.0 * math.log10(factor)


def awgn(x, variance: float, rng: np.random.Generator) -> np.ndarray:
    """Add circularly-symmetric complex Gaussian noise of total power ``variance``."""
    if variance < 0:
        raise ValueError("noise variance must be >= 0")
    x = np.asarray(x, dtype=np.complex128)
    if variance == 0:
        return x.copy()
    scale = math.sqrt(variance / 2.0)
    noise = rng.standard_normal((2,) + x.shape)
    return x + scale * (noise[0] + 1j * noise[1])


@dataclass
class FadingState:
    """Streaming state of one Rayleigh path realisation.

    ``freqs`` and ``phases`` have shape ``(2, n_oscillators)``: row 0 drives
    the in-phase branch, row 1 the quadrature branch. ``index`` is the next
    sample to emit. Single owner: not safe to share between workers.
    """

    doppler_hz: float
    sample_period: float
    freqs: np.ndarray
    phases: np.ndarray
    index: int = 0

    @classmethod
    def create(
        cls,
        doppler_hz: float,
        sample_period: float,
        rng: np.random.Generator,
        n_oscillators: int = DEFAULT_OSCILLATORS,
    ) -> "FadingState":
        if n_oscillators < 1:
            raise ValueError("n_oscillators must be >= 1")
        if doppler_hz < 0 or sample_period <= 0:
            raise ValueError("need doppler_hz >= 0 and sample_period > 0")
        m = np.arange(1, n_oscillators + 1)
        theta = rng.uniform(-np.pi, np.pi, size=(2, 1))
        alpha = (2 * np.pi * m - np.pi + theta) / (4 * n_oscillators)
        phases = rng.uniform(-np.pi, np.pi, size=(2, n_oscillators))
        return cls(doppler_hz, sample_period, doppler_hz * np.cos(alpha), phases)

    @property
    def n_oscillators(self) -> int:
        return self.freqs.shape[1]


def _phasor_table(rows: int, omega: np.ndarray) -> np.ndarray:
    """``exp(1j*k*omega)`` for ``k < rows``, from two small tables.

    Row ``k = a*step + b`` is ``exp(1j*a*step*omega) * exp(1j*b*omega)``, so
    only about ``2*sqrt(rows)`` rows need a complex exponential.
    """
    step = max(1, math.isqrt(rows))
    fine = np.exp(1j * np.outer(np.arange(step), omega))
    coarse = np.exp(1j * np.outer(np.arange(0, rows, step), omega))
    return (coarse[:, None, :] * fine[None, :, :]).reshape(-1, omega.size)[:rows]


def fading_gains(state: FadingState, count: int) -> np.ndarray:
    """Next ``count`` unit-power Rayleigh gains; advances ``state``."""
    count = int(count)
    if count < 0:
        raise ValueError("count must be >= 0")
    out = np.empty(count, dtype=np.complex128)
    if count == 0:
        return out
    omega = 2 * np.pi * state.freqs * state.sample_period  # rad/sample
    amp = 1.0 / math.sqrt(state.n_oscillators)
    # cos(n*w + phi) = Re(exp(1j*k*w) * exp(1j*(n0*w + phi))) with n = n0 + k:
    # one phasor table per call, then a matrix-vector product per chunk
    width = min(count, _CHUNK)
    table = _phasor_table(width, omega.ravel()).reshape(width, 2, -1)
    for start in range(0, count, width):
        rows = min(width, count - start)
        n0 = state.index + start
        anchor = np.exp(1j * (n0 * omega + state.phases))
        i_branch = (table[:rows, 0] @ anchor[0]).real
        q_branch = (table[:rows, 1] @ anchor[1]).real
        out[start : start + rows] = amp * (i_branch + 1j * q_branch)
    state.index += count
    return out


def rician_gains(state: FadingState, k_factor: float, count: int) -> np.ndarray:
    """Rician gains: fixed line-of-sight term plus scaled Rayleigh scatter.

    ``h = sqrt(K/(K+1)) + sqrt(1/(K+1)) * s``; ``K = 0`` returns the Rayleigh
    sequence unchanged.
    """
    if k_factor < 0:
        raise ValueError("k_factor must be >= 0")
    scatter = fading_gains(state, count)
    if k_factor == 0:
        return scatter
    return math.sqrt(k_factor / (k_factor + 1)) + math.sqrt(1 / (k_factor + 1)) * scatter


def apply_flat_fading(x, gains) -> np.ndarray:
    """Multiply each sample by its gain; ``gains`` may be longer than ``x``."""
    x = np.asarray(x, dtype=np.complex128)
    gains = np.asarray(gains, dtype=np.complex128)
    if gains.size < x.size:
        raise ValueError(f"{gains.size} gains for {x.size} samples")
    return x * gains[: x.size]
