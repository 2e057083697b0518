"""Radix-2 FFT pair and OFDM framing with a cyclic prefix."""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

__all__ = ["OfdmConfig", "fft", "ifft", "ofdm_modulate", "ofdm_demodulate"]


@dataclass(frozen=True)
class OfdmConfig:
    """Frame structure: ``n_subcarriers`` data bins, ``cp_len`` prefix samples,
    ``sample_period`` seconds per time-domain sample."""

    n_subcarriers: int = 64
    cp_len: int = 16
    sample_period: float = 2e-6

    def __post_init__(self) -> None:
        n = self.n_subcarriers
        if n < 2 or n & (n - 1):
            raise ValueError(f"n_subcarriers must be a power of two >= 2, got {n}")
        if not 0 <= self.cp_len < n:
            raise ValueError(f"cp_len must satisfy 0 <= cp_len < {n}, got {self.cp_len}")
        if not self.sample_period > 0:
            raise ValueError("sample_period must be positive")

    @property
    def symbol_len(self) -> int:
        return self.n_subcarriers + self.cp_len

    @property
    def cp_overhead(self) -> float:
        return self.symbol_len / self.n_subcarriers


def _check_length(n: int) -> None:
    if n < 1 or n & (n - 1):
        raise ValueError(f"transform length must be a power of two, got {n}")


@functools.lru_cache(maxsize=None)
def _bit_reversal(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


@functools.lru_cache(maxsize=None)
def _twiddles(size: int) -> np.ndarray:
    return np.exp(-2j * np.pi * np.arange(size // 2) / size)


def fft(x) -> np.ndarray:
    """Forward DFT along the last axis, ``X[k] = sum_n x[n] exp(-2j*pi*k*n/N)``.

    Iterative decimation-in-time: bit-reversed reorder, then log2(N)
    butterfly stages, each vectorised over all blocks and leading axes.
    """
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[-1]
    _check_length(n)
    lead = x.shape[:-1]
    out = x[..., _bit_reversal(n)]
    size = 2
    while size <= n:
        half = size // 2
        blocks = out.reshape(*lead, n // size, size)
        even = blocks[..., :half]
        odd = blocks[..., half:] * _twiddles(size)
        out = np.concatenate((even + odd, even - odd), axis=-1)
        size *= 2
    return out.reshape(x.shape)


def ifft(X) -> np.ndarray:
    """Inverse DFT along the last axis, with the 1/N factor."""
    X = np.asarray(X, dtype=np.complex128)
    n = X.shape[-1]
    _check_length(n)
    return np.conj(fft(np.conj(X))) / n


def ofdm_modulate(symbols, cfg: OfdmConfig) -> np.ndarray:
    """Group ``symbols`` into OFDM symbols and return time-domain frames.

    Returns an array of shape ``(n_ofdm_symbols, N + cp_len)``; each row is
    one OFDM symbol with its cyclic prefix. Output is scaled by sqrt(N), so
    the mean sample power equals the mean symbol power.
    """
    symbols = np.asarray(symbols, dtype=np.complex128).ravel()
    n = cfg.n_subcarriers
    if symbols.size % n:
        raise ValueError(f"{symbols.size} symbols is not a multiple of N={n}")
    body = ifft(symbols.reshape(-1, n)) * np.sqrt(n)
    return np.concatenate((body[:, n - cfg.cp_len :], body), axis=1)


def ofdm_demodulate(frames, cfg: OfdmConfig) -> np.ndarray:
    """Strip the prefix from each frame, transform, and return the flat symbol stream.

    ``frames`` is either the 2-D output of :func:`ofdm_modulate` or its
    flattened sample stream.
    """
    frames = np.asarray(frames, dtype=np.complex128)
    width = cfg.symbol_len
    if frames.ndim == 1:
        if frames.size % width:
            raise ValueError(f"{frames.size} samples is not a multiple of frame length {width}")
        frames = frames.reshape(-1, width)
    elif frames.ndim != 2 or frames.shape[1] != width:
        raise ValueError(f"frames must have {width} samples each, got shape {frames.shape}")
    body = frames[:, cfg.cp_len :]
    return (fft(body) / np.sqrt(cfg.n_subcarriers)).ravel()
