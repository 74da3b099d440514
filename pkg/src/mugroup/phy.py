"""Zero-forcing precoding, the group-rate estimate, and the rate oracle.

The estimated capacity of serving a user group simultaneously is

    R(G) = B * sum_{m in G} log2(1 + P_m |h_m w_m|^2 /
                                 (N0 + sum_{i != m} P_i |h_m w_i|^2))

with equal power split P_m = P/|G| and unit-norm zero-forcing steering
columns.  Rates are averaged over subcarriers with the bandwidth applied
once.  An optional mode maps per-user SINR through an 802.11ac-style
MCS table instead of the Shannon log term.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .channel import ChannelSet
from .errors import ConfigurationError, SingularChannelError

__all__ = [
    "RateMode",
    "PhyConfig",
    "SteeringMatrix",
    "McsEntry",
    "DEFAULT_MCS_TABLE",
    "zf_steering",
    "group_rate",
    "RateOracle",
    "make_rate_oracle",
    "map_sinr_to_mcs",
    "phy_rate",
]

# condition-number limit for HH^H before a group counts as rank deficient
_COND_LIMIT = 1e12

# 40 MHz OFDM numerology and MAC framing constants
DATA_SUBCARRIERS = 108
SYMBOL_SECONDS = 3.6e-6  # 3.2 us core symbol + 0.4 us guard interval
MSDU_BYTES = 1508
MPDU_BYTES = 1556
AMPDU_SECONDS = 2.0e-3
SIFS_SECONDS = 16e-6
MAC_OVERHEAD_FACTOR = (MSDU_BYTES / MPDU_BYTES) * (AMPDU_SECONDS / (AMPDU_SECONDS + SIFS_SECONDS))


class RateMode(Enum):
    SHANNON = "shannon"
    MCS_MAPPED = "mcs"


@dataclass(frozen=True)
class McsEntry:
    """One row of the link-adaptation table."""

    index: int
    bits_per_subcarrier: float  # modulation bits times coding rate
    min_snr_db: float


# Modulation ladder BPSK..256-QAM with the usual coding rates; the SNR
# thresholds are this package's documented defaults and can be overridden
# through PhyConfig.
DEFAULT_MCS_TABLE: tuple[McsEntry, ...] = (
    McsEntry(0, 0.5, 2.0),      # BPSK 1/2
    McsEntry(1, 1.0, 5.0),      # QPSK 1/2
    McsEntry(2, 1.5, 9.0),      # QPSK 3/4
    McsEntry(3, 2.0, 11.0),     # 16-QAM 1/2
    McsEntry(4, 3.0, 15.0),     # 16-QAM 3/4
    McsEntry(5, 4.0, 18.0),     # 64-QAM 2/3
    McsEntry(6, 4.5, 20.0),     # 64-QAM 3/4
    McsEntry(7, 5.0, 25.0),     # 64-QAM 5/6
    McsEntry(8, 6.0, 29.0),     # 256-QAM 3/4
    McsEntry(9, 20.0 / 3.0, 31.0),  # 256-QAM 5/6
)


@dataclass(frozen=True)
class PhyConfig:
    """Link-budget and rate-model parameters."""

    bandwidth_hz: float = 40e6
    noise_power: float = 1.0
    total_power: float = 100.0
    rate_mode: RateMode = RateMode.SHANNON
    mac_overhead_enabled: bool = False
    mcs_table: tuple[McsEntry, ...] = DEFAULT_MCS_TABLE

    def __post_init__(self):
        if self.bandwidth_hz <= 0 or self.noise_power <= 0 or self.total_power <= 0:
            raise ValueError("bandwidth_hz, noise_power and total_power must be positive")


@dataclass(frozen=True)
class SteeringMatrix:
    """Unit-norm steering columns for one group, per subcarrier.

    ``columns`` has shape (num_subcarriers, num_tx_antennas, group size);
    column m serves ``group[m]``.
    """

    group: tuple[int, ...]
    columns: np.ndarray
    per_subcarrier: bool


def _canonical_group(group) -> tuple[int, ...]:
    members = tuple(sorted(group))
    if not members:
        raise ValueError("group must be non-empty")
    if len(set(members)) != len(members):
        raise ValueError(f"group members must be distinct, got {group}")
    return members


def zf_steering(channels: ChannelSet, group) -> SteeringMatrix:
    """Channel-inversion steering W = H^H (H H^H)^-1, columns renormalized.

    For a singleton this reduces to the matched direction h^H/||h||.
    Raises SingularChannelError if the stacked group channel is rank
    deficient on any subcarrier.
    """
    members = _canonical_group(group)
    k = len(members)
    if k > channels.num_tx_antennas:
        raise ValueError(
            f"group size {k} exceeds {channels.num_tx_antennas} transmit antennas"
        )
    for u in members:
        if not 0 <= u < channels.num_users:
            raise ValueError(f"user index {u} out of range")

    sc = channels.num_subcarriers
    cols = np.empty((sc, channels.num_tx_antennas, k), dtype=np.complex128)
    for s in range(sc):
        h = channels.entries[members, :, s]  # (k, Nt)
        gram = h @ h.conj().T
        if np.linalg.cond(gram) > _COND_LIMIT:
            raise SingularChannelError(
                f"rank-deficient channel for group {members} on subcarrier {s}"
            )
        try:
            w = np.linalg.solve(gram, h).conj().T  # (Nt, k) = H^H (HH^H)^-1
        except np.linalg.LinAlgError as exc:
            raise SingularChannelError(
                f"singular channel for group {members} on subcarrier {s}"
            ) from exc
        w /= np.linalg.norm(w, axis=0, keepdims=True)
        cols[s] = w
    return SteeringMatrix(members, cols, per_subcarrier=sc > 1)


def _sum_rate_from_gains(gains: np.ndarray, k: int, cfg: PhyConfig) -> float:
    """Rate for one subcarrier from the |h_m w_i|^2 matrix (k x k)."""
    p = cfg.total_power / k
    signal = np.diag(gains)
    interference = gains.sum(axis=1) - signal
    sinr = (p * signal) / (cfg.noise_power + p * interference)
    if cfg.rate_mode is RateMode.SHANNON:
        return cfg.bandwidth_hz * float(np.log2(1.0 + sinr).sum())
    total = 0.0
    for value in sinr:
        entry = map_sinr_to_mcs(10.0 * math.log10(value) if value > 0 else -math.inf,
                                cfg.mcs_table)
        if entry is not None:
            total += phy_rate(entry, cfg)
    return total


def group_rate(channels: ChannelSet, group, cfg: PhyConfig) -> float:
    """Estimated group capacity in bits/s, averaged over subcarriers.

    The interference sum is always evaluated in full even though exact ZF
    drives it to numerical zero on flat channels.
    """
    steering = zf_steering(channels, group)
    members = steering.group
    k = len(members)
    rates = np.empty(channels.num_subcarriers)
    for s in range(channels.num_subcarriers):
        h = channels.entries[members, :, s]
        gains = np.abs(h @ steering.columns[s]) ** 2
        rates[s] = _sum_rate_from_gains(gains, k, cfg)
    return float(rates.mean())


def _batch_shannon_rates(channels: ChannelSet, groups: list[tuple[int, ...]],
                         cfg: PhyConfig) -> np.ndarray:
    """Vectorized Shannon group rates for same-size groups; 0 when singular.

    Uses the same per-item LAPACK routines as the scalar path so memoized
    values do not depend on which path computed them.
    """
    k = len(groups[0])
    sc = channels.num_subcarriers
    n = len(groups)
    idx = np.asarray(groups)  # (n, k)
    # stack as (n*sc, k, Nt)
    h = channels.entries[idx]  # (n, k, Nt, sc)
    h = np.moveaxis(h, 3, 1).reshape(n * sc, k, channels.num_tx_antennas)
    gram = h @ np.conj(np.swapaxes(h, 1, 2))
    ok = np.linalg.cond(gram) <= _COND_LIMIT
    safe = gram.copy()
    safe[~ok] = np.eye(k)
    w = np.conj(np.swapaxes(np.linalg.solve(safe, h), 1, 2))  # (n*sc, Nt, k)
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    gains = np.abs(h @ w) ** 2  # (n*sc, k, k)

    p = cfg.total_power / k
    signal = np.diagonal(gains, axis1=1, axis2=2)
    interference = gains.sum(axis=2) - signal
    sinr = (p * signal) / (cfg.noise_power + p * interference)
    per_sc = cfg.bandwidth_hz * np.log2(1.0 + sinr).sum(axis=1)
    per_sc[~ok] = 0.0
    rates = per_sc.reshape(n, sc).mean(axis=1)
    # a group is degenerate if any subcarrier is
    degenerate = ~ok.reshape(n, sc).all(axis=1)
    rates[degenerate] = 0.0
    return rates


class RateOracle:
    """Memoized map from user groups to their estimated rate.

    Rank-deficient groups get rate 0 instead of an error so that search
    algorithms stay total over all subsets.  Thread safe: concurrent
    identical queries return identical values.
    """

    def __init__(self, channels: ChannelSet, cfg: PhyConfig, max_group_size: int):
        if max_group_size < 1:
            raise ValueError("max_group_size must be >= 1")
        if max_group_size > channels.num_tx_antennas:
            raise ValueError(
                f"max_group_size {max_group_size} exceeds "
                f"{channels.num_tx_antennas} transmit antennas"
            )
        self.channels = channels
        self.cfg = cfg
        self.max_group_size = max_group_size
        self.num_users = channels.num_users
        self.query_count = 0
        self.compute_count = 0
        self._memo: dict[tuple[int, ...], float] = {}
        self._lock = threading.Lock()

    def _check(self, group) -> tuple[int, ...]:
        members = _canonical_group(group)
        if len(members) > self.max_group_size:
            raise ValueError(
                f"group {members} exceeds max group size {self.max_group_size}"
            )
        if members[-1] >= self.num_users or members[0] < 0:
            raise ValueError(f"group {members} out of range for {self.num_users} users")
        return members

    def _compute(self, members: tuple[int, ...]) -> float:
        self.compute_count += 1
        try:
            return group_rate(self.channels, members, self.cfg)
        except SingularChannelError:
            return 0.0

    def rate(self, group) -> float:
        members = self._check(group)
        with self._lock:
            self.query_count += 1
            value = self._memo.get(members)
            if value is None:
                value = self._compute(members)
                self._memo[members] = value
            return value

    def precompute(self, groups) -> None:
        """Batch-fill the memo; only worthwhile in Shannon mode."""
        todo: dict[int, list[tuple[int, ...]]] = {}
        with self._lock:
            for group in groups:
                members = self._check(group)
                if members not in self._memo:
                    todo.setdefault(len(members), []).append(members)
            if not todo:
                return
            if self.cfg.rate_mode is not RateMode.SHANNON:
                for size_groups in todo.values():
                    for members in size_groups:
                        self._memo.setdefault(members, self._compute(members))
                return
            for size_groups in todo.values():
                unique = sorted(set(size_groups))
                rates = _batch_shannon_rates(self.channels, unique, self.cfg)
                self.compute_count += len(unique)
                for members, value in zip(unique, rates):
                    self._memo.setdefault(members, float(value))


def make_rate_oracle(channels: ChannelSet, cfg: PhyConfig, max_group_size: int) -> RateOracle:
    """Lazily memoized rate oracle over groups of size <= max_group_size."""
    return RateOracle(channels, cfg, max_group_size)


def map_sinr_to_mcs(sinr_db: float, table=DEFAULT_MCS_TABLE) -> McsEntry | None:
    """Highest entry whose threshold is met (inclusive); None below MCS 0."""
    if not table:
        raise ConfigurationError("MCS table must not be empty")
    chosen = None
    for entry in table:
        if sinr_db >= entry.min_snr_db:
            chosen = entry
        else:
            break
    return chosen


def phy_rate(entry: McsEntry, cfg: PhyConfig) -> float:
    """PHY data rate in bits/s for the 40 MHz numerology (108 data tones,
    3.6 us symbol), times the MAC efficiency factor when enabled."""
    rate = DATA_SUBCARRIERS * entry.bits_per_subcarrier / SYMBOL_SECONDS
    if cfg.mac_overhead_enabled:
        rate *= MAC_OVERHEAD_FACTOR
    return rate
