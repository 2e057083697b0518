"""Monte Carlo BER measurement over Eb/N0 sweeps."""
from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channel import Family
from .link import LinkConfig, run_block
from .rng import derive_seed, make_streams

__all__ = [
    "BerRecord",
    "BerCurve",
    "StoppingRule",
    "Comparison",
    "run_ber_point",
    "run_sweep",
    "compare_curves",
    "curve_label",
]


@dataclass(frozen=True)
class BerRecord:
    """One measured point. ``upper_bound`` marks a run that saw no errors."""

    ebn0_db: float
    bits_sent: int
    bit_errors: int
    upper_bound: bool = False

    def __post_init__(self) -> None:
        if not 0 <= self.bit_errors <= self.bits_sent:
            raise ValueError("need 0 <= bit_errors <= bits_sent")

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_sent if self.bits_sent else 0.0

    @property
    def std_error(self) -> float:
        if not self.bits_sent:
            return 0.0
        p = self.ber
        return math.sqrt(p * (1.0 - p) / self.bits_sent)


@dataclass
class BerCurve:
    label: str
    records: list[BerRecord] = field(default_factory=list)

    def __post_init__(self) -> None:
        grid = [r.ebn0_db for r in self.records]
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError(f"curve {self.label!r}: ebn0_db must be strictly increasing")

    @property
    def ebn0_db(self) -> np.ndarray:
        return np.array([r.ebn0_db for r in self.records])

    @property
    def ber(self) -> np.ndarray:
        return np.array([r.ber for r in self.records])

    @property
    def std_error(self) -> np.ndarray:
        return np.array([r.std_error for r in self.records])

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class StoppingRule:
    """Stop a point at ``min_errors`` bit errors or ``max_bits`` bits, whichever comes first."""

    min_errors: int = 100
    max_bits: int = 10**7

    def __post_init__(self) -> None:
        if self.min_errors < 1:
            raise ValueError("min_errors must be >= 1")
        if self.max_bits < 1:
            raise ValueError("max_bits must be >= 1")


def run_ber_point(cfg: LinkConfig, rule: StoppingRule, seed) -> BerRecord:
    """Measure BER at ``cfg.ebn0_db``, block by block, until ``rule`` stops it."""
    block = cfg.bits_per_block
    if rule.max_bits < block:
        raise ValueError(f"max_bits={rule.max_bits} is smaller than one block ({block} bits)")
    streams = make_streams(seed)
    bits = errors = 0
    while errors < rule.min_errors and bits < rule.max_bits:
        result = run_block(cfg, block, streams)
        bits += result.bits_sent
        errors += result.bit_errors
    return BerRecord(cfg.ebn0_db, bits, errors, upper_bound=errors == 0)


def curve_label(cfg: LinkConfig) -> str:
    spec = cfg.channel
    parts = [cfg.constellation.name, spec.family.value]
    if spec.fading:
        parts.append(f"fd{spec.doppler_hz:g}")
    if spec.family is Family.RICIAN:
        parts.append(f"K{spec.k_factor:g}")
    return "_".join(parts)


def _point(args):
    cfg, rule, seed = args
    return run_ber_point(cfg, rule, seed)


def run_sweep(
    template: LinkConfig,
    ebn0_db: Sequence[float],
    rule: StoppingRule,
    master_seed,
    label: str | None = None,
    workers: int = 1,
) -> BerCurve:
    """One BER point per Eb/N0 value, each seeded with ``derive_seed(master_seed, i)``.

    Points are independent, so ``workers > 1`` farms them out to processes;
    the result does not depend on the worker count.
    """
    grid = [float(e) for e in ebn0_db]
    if not grid:
        raise ValueError("empty Eb/N0 grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("Eb/N0 grid must be strictly increasing")
    jobs = [
        (dataclasses.replace(template, ebn0_db=e), rule, derive_seed(master_seed, i))
        for i, e in enumerate(grid)
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_point, jobs))
    else:
        records = [_point(job) for job in jobs]
    return BerCurve(label or curve_label(template), records)


@dataclass
class Comparison:
    """Per-point fractional BER reduction of curve ``a`` relative to curve ``b``."""

    ebn0_db: np.ndarray
    reduction: np.ndarray
    aggregate: float


def compare_curves(a: BerCurve, b: BerCurve) -> Comparison:
    """``1 - ber_a/ber_b`` per point; ``nan`` where ``b`` saw no errors.

    The aggregate compares mean BER over the points where both curves have
    errors.
    """
    if not np.array_equal(a.ebn0_db, b.ebn0_db):
        raise ValueError(f"curves {a.label!r} and {b.label!r} use different Eb/N0 grids")
    ber_a, ber_b = a.ber, b.ber
    with np.errstate(divide="ignore", invalid="ignore"):
        reduction = np.where(ber_b > 0, 1.0 - ber_a / ber_b, np.nan)
    usable = (ber_a > 0) & (ber_b > 0)
    if usable.any():
        aggregate = 1.0 - ber_a[usable].mean() / ber_b[usable].mean()
    else:
        aggregate = math.nan
    return Comparison(a.ebn0_db, reduction, float(aggregate))
