"""Command-line front end: run a figure preset or a custom sweep and write CSVs.

Each curve goes to ``<out>/<label>.csv``; ``<out>/manifest.txt`` records the
full configuration and seed as ``key=value`` lines. Exit status is 0 on
success, 1 for usage or configuration errors and 2 for runtime failures.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .channel import snr_to_ebn0_db
from .harness import BerCurve, run_sweep
from .link import LinkConfig, constellation_capture
from .mapping import ConfigError
from .rng import derive_seed, make_streams
from .scenarios import SCENARIOS, Overrides, Scenario, build_scenario

__all__ = ["main", "emit_csv", "emit_scatter_csv", "run_scenario", "format_number"]

log = logging.getLogger(__name__)

CSV_HEADER = "ebn0_db,ber,bits_sent,bit_errors,std_error,upper_bound_flag"
# scatter captures use seeds apart from the sweep points
_SCATTER_KEY = 1000


class UsageError(Exception):
    pass


def format_number(x: float) -> str:
    """Plain decimal with at least 7 significant digits, never exponent notation."""
    return np.format_float_positional(float(x), precision=7, unique=False, fractional=False)


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OSError(f"--out: cannot write {path}: {exc.strerror or exc}") from exc


def emit_csv(curve: BerCurve, path) -> Path:
    path = Path(path)
    lines = [CSV_HEADER]
    for r in curve.records:
        lines.append(",".join([
            format_number(r.ebn0_db),
            format_number(r.ber),
            str(r.bits_sent),
            str(r.bit_errors),
            format_number(r.std_error),
            "1" if r.upper_bound else "0",
        ]))
    _write(path, "\n".join(lines) + "\n")
    return path


def emit_scatter_csv(symbols, path) -> Path:
    path = Path(path)
    symbols = np.asarray(symbols, dtype=np.complex128)
    rows = [f"{format_number(s.real)},{format_number(s.imag)}" for s in symbols]
    _write(path, "\n".join(["re,im", *rows]) + "\n")
    return path


def _fmt_value(v) -> str:
    if isinstance(v, (list, tuple)):
        return ",".join(_fmt_value(x) for x in v)
    if isinstance(v, float):
        return f"{v:g}"
    return str(v)


def _manifest(scenario: Scenario, seed: int, files: dict[str, str]) -> str:
    lines = [
        f"scenario={scenario.name}",
        f"seed={seed}",
        f"axis={scenario.axis}",
        f"grid_db={_fmt_value(scenario.grid_db)}",
        f"min_errors={scenario.rule.min_errors}",
        f"max_bits={scenario.rule.max_bits}",
    ]
    for key, (value, source) in scenario.params.items():
        lines.append(f"param.{key}={_fmt_value(value)}")
        lines.append(f"param.{key}.source={source}")
    for i, curve in enumerate(scenario.curves):
        cfg = curve.config
        p = f"curve.{i}."
        lines += [
            p + f"label={curve.label}",
            p + f"file={files[curve.label]}",
            p + f"scheme={cfg.scheme.value}",
            p + f"order={cfg.order}",
            p + f"mapping={cfg.mapping.value}",
            p + f"channel={cfg.channel.family.value}",
            p + f"doppler_hz={cfg.channel.doppler_hz:g}",
            p + f"k_factor={cfg.channel.los_k_factor:g}",
            p + f"subcarriers={cfg.ofdm.n_subcarriers}",
            p + f"cp_len={cfg.ofdm.cp_len}",
            p + f"sample_period={cfg.ofdm.sample_period:g}",
            p + f"count_cp_energy={int(cfg.count_cp_energy)}",
            p + f"diff_axis={cfg.diff_axis}",
            p + f"symbols_per_block={cfg.symbols_per_block}",
            p + f"ebn0_db={_fmt_value(scenario.ebn0_grid(curve))}",
        ]
    for i, snr in enumerate(scenario.scatter_snr_db):
        lines.append(f"scatter.{i}.snr_db={snr:g}")
        lines.append(f"scatter.{i}.file={files[f'scatter{i}']}")
        lines.append(f"scatter.{i}.symbols={scenario.scatter_symbols}")
    return "\n".join(lines) + "\n"


def run_scenario(scenario: Scenario, seed: int, out, workers: int = 1) -> list[Path]:
    """Run every curve of ``scenario`` and write CSVs plus the manifest into ``out``.

    All curves share ``seed``, so they see common random numbers and their
    differences are not swamped by independent sampling noise.
    """
    out = Path(out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"--out: cannot create {out}: {exc.strerror or exc}") from exc
    written: list[Path] = []
    files: dict[str, str] = {}
    for curve in scenario.curves:
        grid = scenario.ebn0_grid(curve)
        log.info("running %s over %d points", curve.label, len(grid))
        result = run_sweep(curve.config, grid, scenario.rule, seed, curve.label, workers)
        name = f"{curve.label}.csv"
        written.append(emit_csv(result, out / name))
        files[curve.label] = name
    if scenario.scatter_snr_db:
        for i, snr in enumerate(scenario.scatter_snr_db):
            point = _at_snr(scenario, snr)
            symbols = constellation_capture(
                point, scenario.scatter_symbols, make_streams(derive_seed(seed, _SCATTER_KEY, i))
            )
            name = f"scatter_snr{snr:g}.csv"
            written.append(emit_scatter_csv(symbols, out / name))
            files[f"scatter{i}"] = name
    manifest = out / "manifest.txt"
    _write(manifest, _manifest(scenario, seed, files))
    written.append(manifest)
    return written


def _at_snr(scenario: Scenario, snr_db: float) -> LinkConfig:
    cfg = scenario.curves[0].config
    return replace(cfg, ebn0_db=snr_to_ebn0_db(snr_db, cfg.bits_per_symbol, cfg.ofdm,
                                               cfg.count_cp_energy))


def _parse_grid(text: str) -> list[float]:
    parts = text.split(":")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"--ebn0: expected start:step:stop or a single value, got {text!r}")
    if len(values) == 1:
        return values
    if len(values) != 3:
        raise UsageError(f"--ebn0: expected start:step:stop, got {text!r}")
    start, step, stop = values
    if step <= 0 or stop < start:
        raise UsageError("--ebn0: need step > 0 and stop >= start")
    n = int(np.floor((stop - start) / step + 1e-9))
    return [round(start + i * step, 10) for i in range(n + 1)]


def _parse_list(text: str, flag: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"{flag}: expected comma-separated numbers, got {text!r}")
    if not values:
        raise UsageError(f"{flag}: empty list")
    return values


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ofdmlink", description="OFDM BER simulator: figure presets and custom sweeps.")
    p.add_argument("--scenario", default="custom", choices=SCENARIOS)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--ebn0", metavar="START:STEP:STOP",
                   help="inclusive Eb/N0 grid in dB (SNR grid for fig1a/fig1b)")
    p.add_argument("--modulation", choices=("qam", "psk", "dpsk"))
    p.add_argument("--order", type=int)
    p.add_argument("--mapping", choices=("gray", "natural"))
    p.add_argument("--channel", choices=("awgn", "rayleigh", "rician"))
    p.add_argument("--fd", metavar="HZ[,HZ...]", help="Doppler frequency, comma list for sweeps")
    p.add_argument("--k", metavar="K[,K...]", help="Rician K-factor, comma list for sweeps")
    p.add_argument("--ts", type=float, help="sample period in seconds")
    p.add_argument("--subcarriers", type=int)
    p.add_argument("--cp", type=int, help="cyclic-prefix length in samples")
    p.add_argument("--min-errors", type=int)
    p.add_argument("--max-bits", type=int)
    p.add_argument("--block-symbols", type=int, help="OFDM symbols per fading/DPSK block")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="results")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _overrides(args: argparse.Namespace) -> Overrides:
    return Overrides(
        ebn0=_parse_grid(args.ebn0) if args.ebn0 is not None else None,
        modulation=args.modulation,
        order=args.order,
        mapping=args.mapping,
        channel=args.channel,
        fd=_parse_list(args.fd, "--fd") if args.fd is not None else None,
        k=_parse_list(args.k, "--k") if args.k is not None else None,
        ts=args.ts,
        subcarriers=args.subcarriers,
        cp=args.cp,
        min_errors=args.min_errors,
        max_bits=args.max_bits,
        block_symbols=args.block_symbols,
    )


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # usage errors exit 1; --help exits 0
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.workers < 1:
            raise UsageError("--workers must be >= 1")
        if args.block_symbols is not None and args.block_symbols < 1:
            raise UsageError("--block-symbols must be >= 1")
        scenario = build_scenario(args.scenario, _overrides(args))
        for curve in scenario.curves:
            if scenario.rule.max_bits < curve.config.bits_per_block:
                raise UsageError(
                    f"--max-bits: {scenario.rule.max_bits} is below one block "
                    f"({curve.config.bits_per_block} bits for {curve.label})"
                )
    except (UsageError, ConfigError) as exc:
        print(f"ofdmlink: error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"ofdmlink: error: invalid parameter: {exc}", file=sys.stderr)
        return 1
    try:
        written = run_scenario(scenario, args.seed, args.out, args.workers)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"ofdmlink: error: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
