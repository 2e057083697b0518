"""Named experiment presets, one per published figure, plus a free-form ``custom``."""
from __future__ import annotations

from dataclasses import dataclass, field

from .channel import ChannelSpec, snr_to_ebn0_db
from .harness import StoppingRule, curve_label
from .link import LinkConfig
from .mapping import ConfigError
from .ofdm import OfdmConfig

__all__ = ["CurveSpec", "Scenario", "Overrides", "SCENARIOS", "build_scenario"]

SCENARIOS = ("fig1a", "fig1b", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "custom")

PAPER_TS = 2e-6
FADING_BLOCK = 4
STATIC_BLOCK = 32


@dataclass
class CurveSpec:
    label: str
    config: LinkConfig


@dataclass
class Scenario:
    name: str
    curves: list[CurveSpec]
    grid_db: list[float]
    rule: StoppingRule
    axis: str = "ebn0"
    scatter_snr_db: tuple[float, ...] = ()
    scatter_symbols: int = 2000
    # manifest entries: name -> (value, source) with source in {paper, default, cli}
    params: dict[str, tuple[object, str]] = field(default_factory=dict)

    def ebn0_grid(self, curve: CurveSpec) -> list[float]:
        """Eb/N0 points for ``curve``; converts from SNR when the axis is SNR."""
        if self.axis == "ebn0":
            return list(self.grid_db)
        cfg = curve.config
        return [
            snr_to_ebn0_db(s, cfg.bits_per_symbol, cfg.ofdm, cfg.count_cp_energy)
            for s in self.grid_db
        ]


@dataclass
class Overrides:
    """Command-line values; ``None`` means "not given"."""

    ebn0: list[float] | None = None
    modulation: str | None = None
    order: int | None = None
    mapping: str | None = None
    channel: str | None = None
    fd: list[float] | None = None
    k: list[float] | None = None
    ts: float | None = None
    subcarriers: int | None = None
    cp: int | None = None
    min_errors: int | None = None
    max_bits: int | None = None
    block_symbols: int | None = None


def _grid(start: float, step: float, stop: float) -> list[float]:
    n = int(round((stop - start) / step))
    return [start + i * step for i in range(n + 1)]


class _Builder:
    """Tracks where each parameter came from while assembling a scenario."""

    def __init__(self, over: Overrides):
        self.over = over
        self.params: dict[str, tuple[object, str]] = {}

    def pick(self, name: str, cli_value, preset, source: str = "paper"):
        if cli_value is not None:
            self.params[name] = (cli_value, "cli")
            return cli_value
        self.params[name] = (preset, source)
        return preset

    def ofdm(self) -> OfdmConfig:
        defaults = OfdmConfig()
        n = self.pick("subcarriers", self.over.subcarriers, defaults.n_subcarriers, "default")
        cp = self.pick("cp_len", self.over.cp, defaults.cp_len, "default")
        ts = self.pick("sample_period", self.over.ts, PAPER_TS)
        try:
            return OfdmConfig(n, cp, ts)
        except ValueError as exc:
            raise ConfigError(f"--subcarriers/--cp: {exc}") from None

    def rule(self) -> StoppingRule:
        defaults = StoppingRule()
        return StoppingRule(
            self.pick("min_errors", self.over.min_errors, defaults.min_errors, "default"),
            self.pick("max_bits", self.over.max_bits, defaults.max_bits, "default"),
        )


def _reject_for_preset(name: str, over: Overrides) -> None:
    for flag in ("modulation", "order", "mapping", "channel"):
        if getattr(over, flag) is not None:
            raise ConfigError(f"--{flag} is fixed by preset {name}; use --scenario custom")


def _single(values: list[float] | None, flag: str) -> float | None:
    if values is None:
        return None
    if len(values) != 1:
        raise ConfigError(f"--{flag} takes a single value for this scenario")
    return values[0]


def build_scenario(name: str, over: Overrides | None = None) -> Scenario:
    """Assemble scenario ``name`` with command-line overrides applied."""
    over = over or Overrides()
    if name not in SCENARIOS:
        raise ConfigError(f"--scenario: unknown preset {name!r} (choose from {', '.join(SCENARIOS)})")
    if name != "custom":
        _reject_for_preset(name, over)
    b = _Builder(over)
    ofdm = b.ofdm()
    ts = ofdm.sample_period
    rule = b.rule()

    def link(scheme, order, family="awgn", fd=0.0, k=0.0, mapping="gray"):
        # short blocks under fading: each block draws a fresh channel realisation
        block = over.block_symbols or (STATIC_BLOCK if family == "awgn" else FADING_BLOCK)
        try:
            spec = ChannelSpec(family, fd, k, ts)
        except ValueError as exc:
            raise ConfigError(f"--fd/--k/--ts: {exc}") from None
        return LinkConfig(scheme, order, mapping, ofdm, spec, symbols_per_block=block)

    def curves(*configs: LinkConfig) -> list[CurveSpec]:
        return [CurveSpec(curve_label(c), c) for c in configs]

    axis = "ebn0"
    scatter: tuple[float, ...] = ()
    if name in ("fig1a", "fig1b"):
        axis = "snr"
        b.pick("modulation", None, "16-QAM")
        b.pick("channel", None, "awgn")
        grid = b.pick("snr_db", over.ebn0, _grid(0, 2, 20), "default")
        if name == "fig1b":
            scatter = tuple(b.pick("scatter_snr_db", None, [7.0, 11.0, 15.0]))
        cs = curves(link("qam", 16))
    elif name == "fig2":
        b.pick("modulation", None, "16-QAM,16-PSK,D-16PSK")
        b.pick("channel", None, "awgn")
        grid = b.pick("ebn0_db", over.ebn0, _grid(0, 2, 20), "default")
        cs = curves(link("qam", 16), link("psk", 16), link("dpsk", 16))
    elif name == "fig3":
        b.pick("modulation_level", None, 4)
        b.pick("channel", None, "rayleigh")
        fd = b.pick("doppler_hz", _single(over.fd, "fd"), 5.0)
        grid = b.pick("ebn0_db", over.ebn0, _grid(0, 5, 30), "default")
        cs = curves(*(link(s, 4, "rayleigh", fd) for s in ("qam", "psk", "dpsk")))
    elif name == "fig4":
        b.pick("modulation", None, "QAM{2,4,16},PSK{2,4,16},DPSK{2,4,8}")
        b.pick("channel", None, "awgn")
        grid = b.pick("ebn0_db", over.ebn0, _grid(0, 2, 16), "default")
        cs = curves(
            *(link("qam", m) for m in (2, 4, 16)),
            *(link("psk", m) for m in (2, 4, 16)),
            *(link("dpsk", m) for m in (2, 4, 8)),
        )
    elif name == "fig5":
        b.pick("modulation", None, "D-4PSK", "default")
        b.pick("channel", None, "rayleigh")
        fds = b.pick("doppler_hz", over.fd, [1.0, 2.0, 3.0, 4.0, 5.0], "default")
        grid = b.pick("ebn0_db", over.ebn0, _grid(0, 5, 30), "default")
        cs = curves(*(link("dpsk", 4, "rayleigh", fd) for fd in fds))
    elif name == "fig6":
        b.pick("modulation", None, "D-4PSK")
        fd = b.pick("doppler_hz", _single(over.fd, "fd"), 40.0)
        k = b.pick("k_factor", _single(over.k, "k"), 5.0)
        grid = b.pick("ebn0_db", over.ebn0, _grid(0, 5, 30), "default")
        cs = curves(link("dpsk", 4, "rayleigh", fd), link("dpsk", 4, "rician", fd, k))
    elif name == "fig7":
        b.pick("modulation", None, "D-2PSK")
        fd = b.pick("doppler_hz", _single(over.fd, "fd"), 40.0)
        ks = b.pick("k_factor", over.k, [1.0, 2.0, 5.0, 10.0, 30.0])
        grid = b.pick("ebn0_db", over.ebn0, _grid(0, 5, 30), "default")
        cs = curves(
            link("dpsk", 2, "rayleigh", fd),
            link("dpsk", 2, "awgn"),
            *(link("dpsk", 2, "rician", fd, k) for k in ks),
        )
    elif name == "fig8":
        b.pick("modulation", None, "D-4PSK")
        fd = b.pick("doppler_hz", _single(over.fd, "fd"), 40.0)
        k = b.pick("k_factor", _single(over.k, "k"), 5.0)
        b.pick("mapping", None, "gray,natural")
        grid = b.pick("ebn0_db", over.ebn0, _grid(0, 5, 30), "default")
        configs = []
        for family in ("awgn", "rayleigh", "rician"):
            for mapping in ("gray", "natural"):
                configs.append(link("dpsk", 4, family, fd if family != "awgn" else 0.0,
                                    k if family == "rician" else 0.0, mapping))
        cs = curves(*configs)
    else:
        scheme = b.pick("modulation", over.modulation, "qam", "default")
        order = b.pick("order", over.order, 16, "default")
        mapping = b.pick("mapping", over.mapping, "gray", "default")
        family = b.pick("channel", over.channel, "awgn", "default")
        fds = b.pick("doppler_hz", over.fd, [0.0], "default")
        ks = b.pick("k_factor", over.k, [0.0], "default")
        grid = b.pick("ebn0_db", over.ebn0, _grid(0, 2, 20), "default")
        if family == "awgn" and (over.fd or over.k):
            raise ConfigError("--fd/--k need --channel rayleigh or rician")
        if family == "rayleigh" and over.k:
            raise ConfigError("--k needs --channel rician")
        configs = [link(scheme, order, family, fd, k, mapping) for fd in fds for k in ks]
        cs = curves(*configs)

    labels = [c.label for c in cs]
    if len(set(labels)) != len(labels):
        raise ConfigError("duplicate curves: check --fd/--k lists for repeated values")
    return Scenario(name, cs, [float(g) for g in grid], rule, axis, scatter, params=b.params)

