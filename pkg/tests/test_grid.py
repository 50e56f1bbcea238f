"""Resource grid classification, constellations and rate matching."""

import numpy as np
import pytest

from minislot.grid import (
    FDDI,
    MINI_SLOT_LENGTHS,
    PA,
    SCHEMES,
    TDDI,
    Constellation,
    MiniSlotGrid,
    PilotPattern,
    ReClass,
    classify,
    data_symbol_count,
    default_constellation,
    match_coding_rates,
    psk,
    qam,
    standard_pattern,
)


def make_grid(K=64, T=2, delta_sub=2, high_mobility=False):
    return MiniSlotGrid(K, T, standard_pattern(T, high_mobility, delta_sub))


def test_standard_pattern_placement():
    assert standard_pattern(2, False, 2) == PilotPattern((1,), 2, 2)
    assert standard_pattern(4, False, 2) == PilotPattern((1,), 2, 4)
    assert standard_pattern(7, False, 4) == PilotPattern((1,), 4, 7)
    # only the 7-symbol slot grows a second pilot symbol under high mobility
    assert standard_pattern(7, True, 2) == PilotPattern((1, 5), 2, 4)
    assert standard_pattern(2, True, 2) == PilotPattern((1,), 2, 2)
    assert standard_pattern(4, True, 2) == PilotPattern((1,), 2, 4)


def test_grid_validation():
    with pytest.raises(ValueError):
        MiniSlotGrid(64, 3)  # 3 is not a mini-slot length
    with pytest.raises(ValueError):
        MiniSlotGrid(64, 2, PilotPattern((1,), 3, 2))  # 3 does not divide 64
    with pytest.raises(ValueError):
        MiniSlotGrid(64, 2, PilotPattern((5,), 2, 2))  # symbol outside slot
    with pytest.raises(ValueError):
        classify(make_grid(), PA, 64, 1)  # k out of range
    with pytest.raises(ValueError):
        classify(make_grid(), PA, 0, 0)  # t is 1-based
    with pytest.raises(ValueError):
        classify(make_grid(), "DPSK", 0, 1)
    with pytest.raises(ValueError):
        classify(MiniSlotGrid(64, 2), PA, 0, 1)  # no pattern


def test_pilot_count():
    assert make_grid(64, 2, 2).n_pilot_subcarriers == 32
    assert make_grid(64, 2, 4).n_pilot_subcarriers == 16
    assert make_grid(256, 4, 2).n_pilot_subcarriers == 128


def test_classify_pa_t2():
    grid = make_grid(64, 2, 2)
    assert classify(grid, PA, 0, 1) is ReClass.PILOT
    assert classify(grid, PA, 2, 1) is ReClass.PILOT
    assert classify(grid, PA, 1, 1) is ReClass.LINEAR_DATA
    # last pilot at k = 62, so k = 63 extrapolates
    assert classify(grid, PA, 63, 1) is ReClass.EDGE_DATA
    assert classify(grid, PA, 62, 1) is ReClass.PILOT
    assert classify(grid, PA, 61, 1) is ReClass.LINEAR_DATA
    # non-pilot symbol: A on pilot subcarriers, B elsewhere
    assert classify(grid, PA, 0, 2) is ReClass.REGION_A
    assert classify(grid, PA, 2, 2) is ReClass.REGION_A
    assert classify(grid, PA, 1, 2) is ReClass.REGION_B
    assert classify(grid, PA, 63, 2) is ReClass.REGION_B


def test_classify_pa_wider_spacing():
    grid = make_grid(64, 4, 4)
    # pilots at k = 0, 4, ..., 60; edge = k in {61, 62, 63}
    for k in (61, 62, 63):
        assert classify(grid, PA, k, 1) is ReClass.EDGE_DATA
    assert classify(grid, PA, 60, 1) is ReClass.PILOT
    assert classify(grid, PA, 59, 1) is ReClass.LINEAR_DATA


def test_classify_differential():
    grid = make_grid(64, 2)
    for t in (1, 2):
        assert classify(grid, FDDI, 0, t) is ReClass.DIFF_REFERENCE
        assert classify(grid, FDDI, 5, t) is ReClass.DIFF_DATA
    for k in (0, 17, 63):
        assert classify(grid, TDDI, k, 1) is ReClass.DIFF_REFERENCE
        assert classify(grid, TDDI, k, 2) is ReClass.DIFF_DATA


def test_classification_partitions_grid():
    """Tag counts must add up to K*T, and N must match the data count."""
    rng = np.random.default_rng(11)
    for _ in range(12):
        K = int(rng.choice([16, 64, 128]))
        T = int(rng.choice(MINI_SLOT_LENGTHS))
        delta_sub = int(rng.choice([1, 2, 4, 8]))
        high = bool(rng.integers(0, 2))
        grid = MiniSlotGrid(K, T, standard_pattern(T, high, delta_sub))
        for scheme in SCHEMES:
            tags = [
                classify(grid, scheme, k, t)
                for k in range(K)
                for t in range(1, T + 1)
            ]
            assert len(tags) == K * T
            n_data = sum(
                tag
                not in (ReClass.PILOT, ReClass.DIFF_REFERENCE)
                for tag in tags
            )
            if scheme == PA:
                # data = everything except pilots
                expect = K * T - grid.n_pilot_subcarriers * len(
                    grid.pattern.pilot_symbols
                )
                assert n_data == expect
            assert n_data == data_symbol_count(grid, scheme)


def test_data_symbol_counts_standard_cases():
    grid2 = make_grid(64, 2, 2)
    assert data_symbol_count(grid2, PA) == 64 * 2 - 32
    assert data_symbol_count(grid2, FDDI) == 63 * 2
    assert data_symbol_count(grid2, TDDI) == 64 * 1
    grid7 = make_grid(64, 7, 2, high_mobility=True)
    assert data_symbol_count(grid7, PA) == 64 * 7 - 2 * 32
    assert data_symbol_count(grid7, FDDI) == 63 * 7
    assert data_symbol_count(grid7, TDDI) == 64 * 6


def test_psk_points():
    c = psk(4)
    assert c.order == 4 and c.bits == 2.0
    assert np.allclose(np.abs(c.points), 1.0)
    assert c.points[0] == pytest.approx(1.0)
    # eighth roots of unity, distinct
    c8 = psk(8)
    assert len(np.unique(np.round(c8.points, 12))) == 8
    assert np.mean(np.abs(c8.points) ** 2) == pytest.approx(1.0, abs=1e-15)


def test_qam_points():
    c = qam(16)
    assert np.mean(np.abs(c.points) ** 2) == pytest.approx(1.0, abs=1e-14)
    # unnormalized coordinates are the odd integers -3, -1, 1, 3
    raw = c.points * np.sqrt(2 * 15 / 3)
    assert set(np.round(raw.real).astype(int)) == {-3, -1, 1, 3}
    with pytest.raises(ValueError):
        qam(8)  # not a square
    with pytest.raises(ValueError):
        Constellation("psk", 3, np.ones(3))  # not a power of 2


def test_default_constellations():
    assert default_constellation(FDDI, 4).kind == "psk"
    assert default_constellation(TDDI, 8).kind == "psk"
    assert default_constellation(PA, 16).kind == "qam"
    assert default_constellation(PA, 8).kind == "psk"  # no square 8-QAM here
    assert default_constellation(PA, 4).kind == "qam"


def test_match_coding_rates():
    grid = make_grid(64, 2, 2)
    configs = match_coding_rates(64, grid, SCHEMES, 4)
    by_scheme = {c.scheme: c for c in configs}
    assert by_scheme[PA].coding_rate == pytest.approx(64 / (96 * 2))
    assert by_scheme[FDDI].coding_rate == pytest.approx(64 / (126 * 2))
    assert by_scheme[TDDI].coding_rate == pytest.approx(64 / (64 * 2))
    # every scheme carries the same payload back
    for c in configs:
        bits = c.coding_rate * c.n_data_symbols * c.constellation.bits
        assert bits == pytest.approx(64.0)


def test_match_coding_rates_per_scheme_orders():
    grid = make_grid(64, 2, 2)
    configs = match_coding_rates(64, grid, (PA, FDDI), {PA: 16, FDDI: 4})
    assert configs[0].constellation.order == 16
    assert configs[1].constellation.order == 4


def test_match_coding_rates_rejects_overfull_payload():
    grid = make_grid(64, 2, 2)
    with pytest.raises(ValueError):
        match_coding_rates(129, grid, (TDDI,), 4)  # N=64, 2 bits -> max 128
    # boundary: rate exactly 1 is allowed
    configs = match_coding_rates(128, grid, (TDDI,), 4)
    assert configs[0].coding_rate == pytest.approx(1.0)
