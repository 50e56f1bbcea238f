"""Mini-slot resource grids: pilot patterns, element classification, rates.

A mini-slot spans T in {2, 4, 7} OFDM symbols over K subcarriers. The
pilot-assisted scheme places all-ones pilots on one or two pilot-carrying
symbols at every delta_sub-th subcarrier starting from k = 0; differential
schemes carry a reference column/row instead of pilots. Classification tags
partition the K x T grid and drive both the data-symbol accounting and the
estimation-MSE bookkeeping.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PA",
    "FDDI",
    "TDDI",
    "SCHEMES",
    "ReClass",
    "PilotPattern",
    "MiniSlotGrid",
    "Constellation",
    "SchemeConfig",
    "psk",
    "qam",
    "default_constellation",
    "standard_pattern",
    "classify",
    "data_symbol_count",
    "match_coding_rates",
]

PA = "PA"
FDDI = "FDDi"
TDDI = "TDDi"
SCHEMES = (PA, FDDI, TDDI)

MINI_SLOT_LENGTHS = (2, 4, 7)


class ReClass(enum.Enum):
    """Resource-element classification tag."""

    PILOT = "Pilot"
    LINEAR_DATA = "LinearData"
    EDGE_DATA = "EdgeData"
    REGION_A = "RegionA"
    REGION_B = "RegionB"
    DIFF_REFERENCE = "DiffReference"
    DIFF_DATA = "DiffData"


@dataclass(frozen=True)
class PilotPattern:
    """Pilot geometry: pilot-carrying symbols (1-based), spacings.

    delta_sym is the inter-pilot-symbol interval: T when a single symbol
    carries pilots, the gap between the two pilot symbols otherwise.
    """

    pilot_symbols: tuple
    delta_sub: int
    delta_sym: int

    def __post_init__(self):
        if len(self.pilot_symbols) < 1:
            raise ValueError("need at least one pilot-carrying symbol")
        if self.delta_sub < 1:
            raise ValueError("delta_sub must be >= 1")
        if self.delta_sym < 1:
            raise ValueError("delta_sym must be >= 1")
        object.__setattr__(self, "pilot_symbols", tuple(sorted(self.pilot_symbols)))


@dataclass(frozen=True)
class MiniSlotGrid:
    """K x T resource grid, with a pilot pattern for the coherent scheme."""

    n_subcarriers: int
    n_symbols: int
    pattern: PilotPattern | None = None

    def __post_init__(self):
        if self.n_symbols not in MINI_SLOT_LENGTHS:
            raise ValueError(f"mini-slot length must be one of {MINI_SLOT_LENGTHS}")
        if self.n_subcarriers < 2:
            raise ValueError("need K > 1 subcarriers")
        if self.pattern is not None:
            p = self.pattern
            if self.n_subcarriers % p.delta_sub != 0:
                raise ValueError("delta_sub must divide K")
            if any(t < 1 or t > self.n_symbols for t in p.pilot_symbols):
                raise ValueError("pilot symbol indices must lie in [1, T]")

    @property
    def n_pilot_subcarriers(self) -> int:
        """Pilots per pilot-carrying symbol, lambda_p = K / delta_sub."""
        if self.pattern is None:
            raise ValueError("grid has no pilot pattern")
        return self.n_subcarriers // self.pattern.delta_sub


def standard_pattern(n_symbols: int, high_mobility: bool, delta_sub: int) -> PilotPattern:
    """Standard pilot placement for the T = 2 / 4 / 7 mini-slots.

    A single pilot symbol leads the slot except in the high-mobility 7-symbol
    case, where a second pilot symbol sits at t = 5 (the middle of the slot).
    """
    if n_symbols not in MINI_SLOT_LENGTHS:
        raise ValueError(f"mini-slot length must be one of {MINI_SLOT_LENGTHS}")
    if n_symbols == 7 and high_mobility:
        return PilotPattern(pilot_symbols=(1, 5), delta_sub=delta_sub, delta_sym=4)
    return PilotPattern(pilot_symbols=(1,), delta_sub=delta_sub, delta_sym=n_symbols)


def classify(grid: MiniSlotGrid, scheme: str, k: int, t: int) -> ReClass:
    """Classify resource element (k, t); k is 0-based, t is 1-based.

    Pilot-assisted symbols split into pilots, linearly interpolated data and
    edge-extrapolated data (past the last pilot subcarrier) on pilot-carrying
    symbols, and region A (pilot subcarriers, estimate reuse in time) and
    region B (everything else) on the remaining symbols. Differential grids
    have a reference column (FDDi, k = 0) or row (TDDi, t = 1).
    """
    K, T = grid.n_subcarriers, grid.n_symbols
    if not (0 <= k < K) or not (1 <= t <= T):
        raise ValueError(f"resource element ({k}, {t}) outside {K}x{T} grid")
    if scheme == FDDI:
        return ReClass.DIFF_REFERENCE if k == 0 else ReClass.DIFF_DATA
    if scheme == TDDI:
        return ReClass.DIFF_REFERENCE if t == 1 else ReClass.DIFF_DATA
    if scheme != PA:
        raise ValueError(f"unknown scheme {scheme!r}")
    if grid.pattern is None:
        raise ValueError("pilot-assisted classification needs a pilot pattern")
    delta_sub = grid.pattern.delta_sub
    last_pilot = K - delta_sub  # pilots anchored at k = 0, step delta_sub
    on_pilot_symbol = t in grid.pattern.pilot_symbols
    on_pilot_subcarrier = k % delta_sub == 0
    if on_pilot_symbol:
        if on_pilot_subcarrier:
            return ReClass.PILOT
        if k > last_pilot:
            return ReClass.EDGE_DATA
        return ReClass.LINEAR_DATA
    return ReClass.REGION_A if on_pilot_subcarrier else ReClass.REGION_B


def data_symbol_count(grid: MiniSlotGrid, scheme: str) -> int:
    """Available data symbols N for one scheme on this grid."""
    K, T = grid.n_subcarriers, grid.n_symbols
    if scheme == PA:
        if grid.pattern is None:
            raise ValueError("pilot-assisted scheme needs a pilot pattern")
        return K * T - grid.n_pilot_subcarriers * len(grid.pattern.pilot_symbols)
    if scheme == FDDI:
        return (K - 1) * T
    if scheme == TDDI:
        return K * (T - 1)
    raise ValueError(f"unknown scheme {scheme!r}")


# ---------------------------------------------------------------------------
# Constellations and rate matching
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Constellation:
    """Unit-average-power symbol alphabet."""

    kind: str  # 'psk' or 'qam'
    order: int
    points: np.ndarray

    def __post_init__(self):
        if self.order < 2 or (self.order & (self.order - 1)) != 0:
            raise ValueError("constellation order must be a power of 2")

    @property
    def bits(self) -> float:
        return float(np.log2(self.order))


def psk(order: int) -> Constellation:
    """M-PSK alphabet exp(j*2*pi*m/M), m = 0..M-1."""
    pts = np.exp(2j * np.pi * np.arange(order) / order)
    return Constellation(kind="psk", order=order, points=pts)


def qam(order: int) -> Constellation:
    """Square M-QAM with odd-integer coordinates, normalized to unit power."""
    side = int(round(np.sqrt(order)))
    if side * side != order:
        raise ValueError("QAM order must be a perfect square")
    levels = np.arange(-(side - 1), side, 2, dtype=float)  # -(side-1) .. side-1
    re, im = np.meshgrid(levels, levels)
    pts = (re + 1j * im).ravel()
    xi = 2.0 * (order - 1) / 3.0  # average power of the raw lattice
    return Constellation(kind="qam", order=order, points=pts / np.sqrt(xi))


def default_constellation(scheme: str, order: int) -> Constellation:
    """Alphabet convention: differential schemes ride PSK phases by
    construction; the coherent scheme uses square QAM when one exists
    (QPSK and 4-QAM are the same set) and falls back to PSK otherwise.
    """
    if scheme in (FDDI, TDDI):
        return psk(order)
    side = int(round(np.sqrt(order)))
    if side * side == order:
        return qam(order)
    return psk(order)


@dataclass(frozen=True)
class SchemeConfig:
    """One scheme's matched operating point on a shared grid."""

    scheme: str
    constellation: Constellation
    coding_rate: float
    n_data_symbols: int

    def __post_init__(self):
        if not (0.0 < self.coding_rate <= 1.0):
            raise ValueError("coding rate must lie in (0, 1]")


def match_coding_rates(n_info_bits: int, grid: MiniSlotGrid, schemes, orders) -> list:
    """Match coding rates so every scheme carries the same payload.

    orders is either one modulation order for all schemes or a mapping
    scheme -> order. Rate = B / (N * log2 M); payloads that would need
    rate > 1 are rejected.
    """
    if n_info_bits <= 0:
        raise ValueError("payload must be positive")
    configs = []
    for scheme in schemes:
        order = orders[scheme] if isinstance(orders, dict) else int(orders)
        n = data_symbol_count(grid, scheme)
        rate = n_info_bits / (n * np.log2(order))
        if rate > 1.0:
            raise ValueError(
                f"payload B={n_info_bits} exceeds capacity of {scheme} "
                f"(N={n}, M={order}: rate {rate:.3f} > 1)"
            )
        configs.append(
            SchemeConfig(
                scheme=scheme,
                constellation=default_constellation(scheme, order),
                coding_rate=float(rate),
                n_data_symbols=n,
            )
        )
    return configs
