"""Air-time-fair scheduling, experiment sweeps, and result reporting.

A grouping solution is realized as a round-robin schedule in which a
group of size n holds the channel for n single-user slots, rotating the
primary user, so every user is primary exactly once per cycle.  System
throughput is therefore objective / M: total bits per cycle divided by
the M equal slots that make up the cycle.

``run_experiment`` reproduces the comparison sweeps (throughput versus
network size, versus channel correlation, and runtime scaling) over
seeded channel realizations and emits deterministic CSV rows.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .baselines import SusParams, random_grouping, sus_grouping, zfs_grouping
from .channel import ChannelSet, CorrelatedRicianSpec, generate_rician, load_channels
from .errors import ConfigurationError
from .gma import gma, optimal_mu2_su
from .grouping import (
    DEFAULT_PARTITION_CAP,
    GroupingSolution,
    count_partitions,
    exhaustive_search,
    objective,
)
from .phy import McsEntry, PhyConfig, RateMode, make_rate_oracle

__all__ = [
    "Scenario",
    "Slot",
    "Schedule",
    "ExperimentConfig",
    "ResultRow",
    "DEFAULT_T_SU",
    "build_schedule",
    "slot_rotation",
    "system_throughput",
    "run_experiment",
    "run_runtime_comparison",
    "write_csv",
    "CSV_HEADER",
]

# one single-user slot: max AMPDU duration plus SIFS
DEFAULT_T_SU = 2.016e-3

CSV_HEADER = ("scenario,M,Nu,rho,algorithm,seed_count,"
              "mean_mbps,p10_mbps,p90_mbps,ratio_to_opt,runtime_ms")

ALGORITHMS = ("full_search", "blossom", "gma", "zfs", "sus", "random")


class Scenario(Enum):
    USER_SWEEP = "user_sweep"
    RHO_SWEEP = "rho_sweep"
    RUNTIME_SWEEP = "runtime_sweep"


@dataclass(frozen=True)
class Slot:
    group: tuple[int, ...]
    primary_user: int
    duration: float


@dataclass(frozen=True)
class Schedule:
    """Ordered transmission slots; each group appears once per member with
    the primary role rotating, so group air time is |g| * t_su."""

    slots: tuple[Slot, ...]
    t_su: float


def build_schedule(solution: GroupingSolution, t_su: float = DEFAULT_T_SU) -> Schedule:
    """Round-robin schedule over the groups in canonical order."""
    slots = []
    for group in solution.groups:
        for primary in group:
            slots.append(Slot(group, primary, t_su))
    return Schedule(tuple(slots), t_su)


def slot_rotation(slot: Slot) -> tuple[int, ...]:
    """Group members rotated so the primary user leads, e.g. (E, F, D)."""
    i = slot.group.index(slot.primary_user)
    return slot.group[i:] + slot.group[:i]


def system_throughput(solution: GroupingSolution, oracle) -> float:
    """Objective divided by the number of users: bits per second delivered
    by one fair schedule cycle of M equal slots."""
    return objective(solution.groups, oracle) / solution.num_users


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: scenario grid, channel model, PHY, algorithms, seeds."""

    scenario: Scenario
    m_values: tuple[int, ...]
    nu_values: tuple[int, ...]
    rho_values: tuple[float, ...] = (0.0,)
    correlated_users: int = 0
    num_tx_antennas: int = 4
    num_subcarriers: int = 1
    k_factor_db: float = 8.0
    channel_file: str | None = None
    phy: PhyConfig = field(default_factory=PhyConfig)
    algorithms: tuple[str, ...] = ("full_search", "gma", "zfs", "sus", "random")
    seeds: tuple[int, ...] = tuple(range(50))
    output: str | None = None
    partition_cap: int = DEFAULT_PARTITION_CAP
    sus_params: SusParams = field(default_factory=SusParams)

    def validate(self) -> None:
        if not self.seeds:
            raise ConfigurationError("seed list must not be empty")
        if not self.m_values or not self.nu_values:
            raise ConfigurationError("m_values and nu_values must not be empty")
        for name in self.algorithms:
            if name not in ALGORITHMS:
                raise ConfigurationError(
                    f"unknown algorithm {name!r}; choose from {ALGORITHMS}")
        for nu in self.nu_values:
            if nu > self.num_tx_antennas:
                raise ConfigurationError(
                    f"Nu={nu} exceeds {self.num_tx_antennas} transmit antennas")
        if self.channel_file is not None and not Path(self.channel_file).exists():
            raise ConfigurationError(f"channel file not found: {self.channel_file}")
        if "full_search" in self.algorithms and self.scenario is not Scenario.RUNTIME_SWEEP:
            for m in self.m_values:
                for nu in self.nu_values:
                    n = count_partitions(m, nu)
                    if n > self.partition_cap:
                        raise ConfigurationError(
                            f"full search over M={m}, Nu={nu} needs {n} partitions, "
                            f"above the cap of {self.partition_cap}")

    @staticmethod
    def from_json(path_or_text) -> "ExperimentConfig":
        """Build a config from the documented JSON schema (see README).

        Accepts a file path or a JSON string.
        """
        if isinstance(path_or_text, Path):
            raw = json.loads(path_or_text.read_text())
        elif isinstance(path_or_text, str) and Path(path_or_text).exists():
            raw = json.loads(Path(path_or_text).read_text())
        else:
            raw = json.loads(path_or_text)
        return _config_from_dict(raw)


def _config_from_dict(raw: dict) -> ExperimentConfig:
    try:
        scenario = Scenario(raw["scenario"])
    except (KeyError, ValueError):
        raise ConfigurationError(
            f"scenario must be one of {[s.value for s in Scenario]}") from None
    channel = raw.get("channel", {})
    phy_raw = raw.get("phy", {})
    phy_kwargs = {}
    if "bandwidth_hz" in phy_raw:
        phy_kwargs["bandwidth_hz"] = float(phy_raw["bandwidth_hz"])
    if "noise_power" in phy_raw:
        phy_kwargs["noise_power"] = float(phy_raw["noise_power"])
    if "total_power" in phy_raw:
        phy_kwargs["total_power"] = float(phy_raw["total_power"])
    if "rate_mode" in phy_raw:
        phy_kwargs["rate_mode"] = RateMode(phy_raw["rate_mode"])
    if "mac_overhead" in phy_raw:
        phy_kwargs["mac_overhead_enabled"] = bool(phy_raw["mac_overhead"])
    if "mcs_table" in phy_raw:
        phy_kwargs["mcs_table"] = tuple(
            McsEntry(int(i), float(b), float(s)) for i, b, s in phy_raw["mcs_table"])
    seeds_raw = raw.get("seeds", {"count": 50, "base": 0})
    if isinstance(seeds_raw, dict):
        seeds = tuple(range(int(seeds_raw.get("base", 0)),
                            int(seeds_raw.get("base", 0)) + int(seeds_raw["count"])))
    else:
        seeds = tuple(int(s) for s in seeds_raw)
    sus_raw = raw.get("sus", {})
    sus_params = SusParams(
        alpha=float(sus_raw.get("alpha", 0.4)),
        sweep=tuple(sus_raw["sweep"]) if "sweep" in sus_raw else SusParams().sweep,
    )
    try:
        cfg = ExperimentConfig(
            scenario=scenario,
            m_values=tuple(int(m) for m in raw["m_values"]),
            nu_values=tuple(int(n) for n in raw["nu_values"]),
            rho_values=tuple(float(r) for r in raw.get("rho_values", [0.0])),
            correlated_users=int(raw.get("correlated_users", 0)),
            num_tx_antennas=int(channel.get("num_tx_antennas", 4)),
            num_subcarriers=int(channel.get("num_subcarriers", 1)),
            k_factor_db=float(channel.get("k_factor_db", 8.0)),
            channel_file=raw.get("channel_file"),
            phy=PhyConfig(**phy_kwargs),
            algorithms=tuple(raw.get("algorithms",
                                     ["full_search", "gma", "zfs", "sus", "random"])),
            seeds=seeds,
            output=raw.get("output"),
            partition_cap=int(raw.get("partition_cap", DEFAULT_PARTITION_CAP)),
            sus_params=sus_params,
        )
    except KeyError as exc:
        raise ConfigurationError(f"missing config field {exc}") from None
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from None
    cfg.validate()
    return cfg


@dataclass(frozen=True)
class ResultRow:
    """Aggregated result for one (scenario point, algorithm)."""

    scenario: str
    m: int
    nu: int
    rho: float
    algorithm: str
    seed_count: int
    mean_mbps: float
    p10_mbps: float
    p90_mbps: float
    ratio_to_opt: float  # NaN when full search was not run
    runtime_ms: float
    runtime_db_vs_random: float = math.nan
    skipped: bool = False


def _channels_for(cfg: ExperimentConfig, m: int, rho: float, seed: int,
                  file_channels: ChannelSet | None) -> ChannelSet:
    if file_channels is not None:
        if m > file_channels.num_users:
            raise ConfigurationError(
                f"channel file holds {file_channels.num_users} users, need {m}")
        pick = np.sort(np.random.default_rng(seed).choice(
            file_channels.num_users, size=m, replace=False))
        return ChannelSet(m, file_channels.num_tx_antennas,
                          file_channels.num_subcarriers,
                          file_channels.entries[pick])
    spec = CorrelatedRicianSpec(
        num_users=m,
        num_tx_antennas=cfg.num_tx_antennas,
        num_subcarriers=cfg.num_subcarriers,
        k_factor_db=cfg.k_factor_db,
        rho=rho,
        correlated_user_count=min(cfg.correlated_users, m),
        seed=seed,
    )
    return generate_rician(spec)


def _run_algorithm(name: str, channels: ChannelSet, oracle, m: int, nu: int,
                   seed: int, cfg: ExperimentConfig) -> GroupingSolution:
    if name == "full_search":
        return exhaustive_search(m, nu, oracle, cap=cfg.partition_cap)
    if name == "blossom":
        return optimal_mu2_su(oracle, m)
    if name == "gma":
        return gma(oracle, m, nu)
    if name == "zfs":
        return zfs_grouping(oracle, m, nu)
    if name == "sus":
        return sus_grouping(channels, oracle, m, nu, cfg.sus_params)
    if name == "random":
        return random_grouping(m, nu, seed, oracle)
    raise ConfigurationError(f"unknown algorithm {name!r}")


def _grid(cfg: ExperimentConfig):
    for m in cfg.m_values:
        for nu in cfg.nu_values:
            if cfg.scenario is Scenario.RHO_SWEEP:
                for rho in cfg.rho_values:
                    yield m, nu, rho
            else:
                yield m, nu, cfg.rho_values[0]


def run_experiment(cfg: ExperimentConfig) -> list[ResultRow]:
    """Score every configured algorithm over the scenario grid.

    Per grid point and seed all algorithms share one memoized oracle, so
    identical groups are scored identically; ratio-to-optimal is the mean
    over seeds of the per-seed ratio against full search.
    """
    cfg.validate()
    if cfg.scenario is Scenario.RUNTIME_SWEEP:
        return run_runtime_comparison(cfg)
    file_channels = load_channels(cfg.channel_file) if cfg.channel_file else None
    # full search runs first so per-seed ratios are always defined
    ordered = sorted(cfg.algorithms, key=lambda a: a != "full_search")
    rows = []
    for m, nu, rho in _grid(cfg):
        tput = {name: [] for name in ordered}
        runtime = {name: [] for name in ordered}
        for seed in cfg.seeds:
            channels = _channels_for(cfg, m, rho, seed, file_channels)
            oracle = make_rate_oracle(channels, cfg.phy, nu)
            for name in ordered:
                start = time.perf_counter()
                solution = _run_algorithm(name, channels, oracle, m, nu, seed, cfg)
                runtime[name].append((time.perf_counter() - start) * 1e3)
                tput[name].append(system_throughput(solution, oracle) / 1e6)
        opt = np.asarray(tput["full_search"]) if "full_search" in tput else None
        for name in cfg.algorithms:
            vals = np.asarray(tput[name])
            ratio = float((vals / opt).mean()) if opt is not None else math.nan
            rows.append(ResultRow(
                scenario=cfg.scenario.value, m=m, nu=nu, rho=rho, algorithm=name,
                seed_count=len(cfg.seeds),
                mean_mbps=float(vals.mean()),
                p10_mbps=float(np.percentile(vals, 10)),
                p90_mbps=float(np.percentile(vals, 90)),
                ratio_to_opt=ratio,
                runtime_ms=float(np.mean(runtime[name])),
            ))
    return rows


def run_runtime_comparison(cfg: ExperimentConfig) -> list[ResultRow]:
    """Wall-clock comparison normalized to random selection, in dB.

    Every algorithm is timed end to end on its own fresh oracle so each
    pays for exactly the rate queries it makes.  Full search is skipped
    (with a marker row) wherever the partition count exceeds the cap.
    """
    cfg.validate()
    if cfg.scenario is not Scenario.RUNTIME_SWEEP:
        raise ConfigurationError("run_runtime_comparison needs the runtime_sweep scenario")
    file_channels = load_channels(cfg.channel_file) if cfg.channel_file else None
    ordered = sorted(cfg.algorithms, key=lambda a: a != "random")
    if "random" not in ordered:
        ordered.insert(0, "random")
    rows = []
    for m, nu, rho in _grid(cfg):
        tput = {name: [] for name in ordered}
        runtime = {name: [] for name in ordered}
        skip_full = ("full_search" in ordered
                     and count_partitions(m, nu) > cfg.partition_cap)
        for seed in cfg.seeds:
            channels = _channels_for(cfg, m, rho, seed, file_channels)
            for name in ordered:
                if name == "full_search" and skip_full:
                    continue
                oracle = make_rate_oracle(channels, cfg.phy, nu)
                start = time.perf_counter()
                solution = _run_algorithm(name, channels, oracle, m, nu, seed, cfg)
                runtime[name].append((time.perf_counter() - start) * 1e3)
                tput[name].append(system_throughput(solution, oracle) / 1e6)
        base = float(np.mean(runtime["random"]))
        for name in cfg.algorithms:
            if name == "full_search" and skip_full:
                rows.append(ResultRow(
                    scenario=cfg.scenario.value, m=m, nu=nu, rho=rho,
                    algorithm=name, seed_count=len(cfg.seeds),
                    mean_mbps=math.nan, p10_mbps=math.nan, p90_mbps=math.nan,
                    ratio_to_opt=math.nan, runtime_ms=math.nan, skipped=True))
                continue
            vals = np.asarray(tput[name])
            mean_ms = float(np.mean(runtime[name]))
            rows.append(ResultRow(
                scenario=cfg.scenario.value, m=m, nu=nu, rho=rho, algorithm=name,
                seed_count=len(cfg.seeds),
                mean_mbps=float(vals.mean()),
                p10_mbps=float(np.percentile(vals, 10)),
                p90_mbps=float(np.percentile(vals, 90)),
                ratio_to_opt=math.nan,
                runtime_ms=mean_ms,
                runtime_db_vs_random=10.0 * math.log10(mean_ms / base),
            ))
    return rows


def _fmt(value: float, spec: str) -> str:
    return "" if math.isnan(value) else format(value, spec)


def write_csv(rows: list[ResultRow], dest) -> None:
    """Emit rows under the fixed header; NaN cells are left empty."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="ascii") as fh:
            write_csv(rows, fh)
        return
    dest.write(CSV_HEADER + "\n")
    for r in rows:
        dest.write(",".join([
            r.scenario, str(r.m), str(r.nu), _fmt(r.rho, ".3g"), r.algorithm,
            str(r.seed_count), _fmt(r.mean_mbps, ".6f"), _fmt(r.p10_mbps, ".6f"),
            _fmt(r.p90_mbps, ".6f"), _fmt(r.ratio_to_opt, ".6f"),
            _fmt(r.runtime_ms, ".3f"),
        ]) + "\n")
