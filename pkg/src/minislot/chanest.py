"""Pilot-based channel estimation and its closed-form MSE analysis.

Estimation runs in three stages: LMMSE filtering of the least-squares pilot
observations, linear interpolation across subcarriers (with a two-point
linear extrapolation past the last pilot subcarrier), and reuse of the
nearest preceding pilot symbol's estimates on the remaining OFDM symbols.

The closed-form MSE components mirror those stages:

  phi_lmmse    pilot subcarriers on pilot-carrying symbols
  phi_linear   interpolated subcarriers on pilot-carrying symbols
  phi_edge     extrapolated edge subcarriers (diagnostic; the headline
               average folds edge into linear)
  phi_region_a pilot subcarriers on symbols reusing estimates in time
  phi_region_b interpolated subcarriers on reuse symbols

The closed forms treat the pilot-stage estimation error as white with
variance phi_lmmse and independent of the channel. That is exact for the
LMMSE residual variance itself but an approximation for the interpolation
and reuse stages, where the actual LMMSE error is correlated across pilots
and with the channel. measure_mse therefore offers two empirical error
models: 'matched' draws white pilot errors (the analysis's own premise, the
right oracle for validating the formulas) and 'estimator' runs the honest
LMMSE chain (the right view of what a receiver would see). The gap between
them is real and worth knowing about; demos/demo_estimation_mse.py shows it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._util import as_rng
from .channel import freq_correlation, time_correlation, sample_channel_grids
from .grid import MiniSlotGrid, PilotPattern

__all__ = [
    "EstimationCollapseError",
    "PilotCovariance",
    "MseBreakdown",
    "MseMeasurement",
    "pilot_covariance",
    "lmmse_estimate",
    "interpolate_linear",
    "phi_lmmse",
    "phi_linear",
    "phi_edge",
    "phi_region_a",
    "phi_region_b",
    "phi_edge_region_b",
    "average_mse",
    "channel_estimation_mse",
    "effective_snr",
    "measure_mse",
]


class EstimationCollapseError(ValueError):
    """sigma_e^2 >= 1: estimation error swamps the signal, no effective SNR."""


@dataclass(frozen=True)
class PilotCovariance:
    """Channel autocorrelation matrix at the pilot subcarriers.

    R[i, j] = freq_correlation((i - j) * delta_sub); Hermitian PSD with
    trace lambda_p for a unit-power channel. psi holds its eigenvalues.
    """

    R: np.ndarray
    psi: np.ndarray


def pilot_covariance(pdp, n_subcarriers: int, delta_sub: int) -> PilotCovariance:
    if n_subcarriers % delta_sub != 0:
        raise ValueError("delta_sub must divide K")
    n_pilots = n_subcarriers // delta_sub
    lags = (np.arange(n_pilots)[:, None] - np.arange(n_pilots)[None, :]) * delta_sub
    first_col = np.array(
        [
            freq_correlation(int(l * delta_sub), pdp, n_subcarriers)
            for l in range(n_pilots)
        ]
    )
    R = np.empty((n_pilots, n_pilots), dtype=complex)
    R[lags >= 0] = first_col[lags[lags >= 0] // delta_sub]
    R[lags < 0] = np.conj(first_col[-lags[lags < 0] // delta_sub])
    psi = np.linalg.eigvalsh(R)
    if psi.min() < -1e-8 * n_pilots:
        raise ValueError("pilot covariance has a significantly negative eigenvalue")
    return PilotCovariance(R=R, psi=np.maximum(psi, 0.0))


def _lmmse_filter(cov: PilotCovariance, gamma: float) -> np.ndarray:
    """A = R (R + I/gamma)^{-1}; returned so x -> A @ x."""
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    n = cov.R.shape[0]
    # solve gives (R + I/g)^{-1} R = A^H since both factors are Hermitian
    ah = np.linalg.solve(cov.R + np.eye(n) / gamma, cov.R)
    return ah.conj().T


def lmmse_estimate(ls_estimates, cov: PilotCovariance, gamma: float) -> np.ndarray:
    """LMMSE-filter least-squares pilot observations.

    Accepts one observation vector (lambda_p,) or a batch (n, lambda_p);
    the filter R (R + I/gamma)^{-1} applies along the last axis.
    """
    ls = np.asarray(ls_estimates, dtype=complex)
    filt = _lmmse_filter(cov, gamma)
    return ls @ filt.T


def interpolate_linear(h_pilots, delta_sub: int) -> np.ndarray:
    """Expand pilot-subcarrier estimates to all K = lambda_p * delta_sub bins.

    Interior positions between pilots get the two-point linear interpolation
    ((delta-kd)/delta, kd/delta); the delta_sub - 1 positions past the last
    pilot are extrapolated from the last two pilots with weights
    (-kd/delta, (delta+kd)/delta). Needs lambda_p >= 2. Batched along
    leading axes.
    """
    h = np.asarray(h_pilots, dtype=complex)
    n_pilots = h.shape[-1]
    if n_pilots < 2:
        raise ValueError("edge extrapolation needs at least two pilots")
    delta = int(delta_sub)
    if delta < 1:
        raise ValueError("delta_sub must be >= 1")
    if delta == 1:
        return h.copy()
    K = n_pilots * delta
    out = np.empty(h.shape[:-1] + (K,), dtype=complex)
    out[..., ::delta] = h
    kd = np.arange(1, delta, dtype=float)
    w_left = (delta - kd) / delta
    w_right = kd / delta
    interior = w_left * h[..., :-1, None] + w_right * h[..., 1:, None]
    idx = (np.arange(n_pilots - 1)[:, None] * delta + kd.astype(int)[None, :]).ravel()
    out[..., idx] = interior.reshape(h.shape[:-1] + (idx.size,))
    edge = (-kd / delta) * h[..., -2, None] + ((delta + kd) / delta) * h[..., -1, None]
    out[..., (n_pilots - 1) * delta + kd.astype(int)] = edge
    return out


# ---------------------------------------------------------------------------
# Closed-form MSE components
# ---------------------------------------------------------------------------

def phi_lmmse(cov: PilotCovariance, gamma: float) -> float:
    """Per-pilot LMMSE residual MSE (1/lambda_p) sum psi/(gamma*psi + 1)."""
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    return float(np.mean(cov.psi / (gamma * cov.psi + 1.0)))


def _re_rho_f(pdp, n_subcarriers, lags) -> np.ndarray:
    return np.array(
        [freq_correlation(int(l), pdp, n_subcarriers).real for l in np.atleast_1d(lags)]
    )


def _interp_constant(delta: int, re_rho_delta: float, phi: float) -> float:
    """The constant term shared by the interpolation-stage MSE formulas:
    (5d-1)/(3d) + ((d+1)/(3d)) Re rho_f(d) + ((2d-1)/(3d)) phi_lmmse."""
    d = float(delta)
    return (5 * d - 1) / (3 * d) + (d + 1) / (3 * d) * re_rho_delta + (2 * d - 1) / (
        3 * d
    ) * phi


def _interp_cross(pdp, n_subcarriers, delta: int) -> np.ndarray:
    """Per-offset cross term ((d-kd)/d) Re rho_f(kd) + (kd/d) Re rho_f(d-kd)."""
    kd = np.arange(1, delta, dtype=float)
    rho_kd = _re_rho_f(pdp, n_subcarriers, kd)
    rho_rev = _re_rho_f(pdp, n_subcarriers, delta - kd)
    return (delta - kd) / delta * rho_kd + kd / delta * rho_rev


def phi_linear(pdp, n_subcarriers: int, delta_sub: int, phi_lmmse_value: float) -> float:
    """Average MSE of the interior linearly interpolated subcarriers."""
    delta = int(delta_sub)
    if delta == 1:
        return 0.0  # no interpolated positions
    rho_delta = float(_re_rho_f(pdp, n_subcarriers, delta)[0])
    const = _interp_constant(delta, rho_delta, phi_lmmse_value)
    cross = _interp_cross(pdp, n_subcarriers, delta)
    return float(const - 2.0 / (delta - 1) * cross.sum())


def phi_edge(pdp, n_subcarriers: int, delta_sub: int, phi_lmmse_value: float) -> float:
    """Average MSE of the edge-extrapolated subcarriers (diagnostic).

    Extrapolation weights a = -kd/d on the second-to-last pilot and
    b = (d+kd)/d on the last; the headline average ignores the difference
    between this and phi_linear, so this stays a side output.
    """
    delta = int(delta_sub)
    if delta == 1:
        return 0.0
    kd = np.arange(1, delta, dtype=float)
    a = -kd / delta
    b = (delta + kd) / delta
    rho_delta = float(_re_rho_f(pdp, n_subcarriers, delta)[0])
    rho_kd = _re_rho_f(pdp, n_subcarriers, kd)
    rho_dk = _re_rho_f(pdp, n_subcarriers, delta + kd)
    per_kd = (
        1.0
        + a * a
        + b * b
        + 2 * a * b * rho_delta
        - 2 * a * rho_dk
        - 2 * b * rho_kd
        + (a * a + b * b) * phi_lmmse_value
    )
    return float(per_kd.mean())


def phi_region_a(doppler, delta_sym: int, phi_lmmse_value: float) -> float:
    """Average MSE at pilot subcarriers on estimate-reuse symbols."""
    d_sym = int(delta_sym)
    if d_sym == 1:
        return float(phi_lmmse_value)  # no reuse symbols exist
    dt = np.arange(1, d_sym)
    rho_t = time_correlation(dt, doppler)
    return float(2.0 + phi_lmmse_value - 2.0 / (d_sym - 1) * rho_t.sum())


def phi_region_b(
    pdp, doppler, n_subcarriers: int, delta_sub: int, delta_sym: int,
    phi_lmmse_value: float,
) -> float:
    """Average MSE at interpolated subcarriers on estimate-reuse symbols.

    Degenerate geometries reduce to the applicable component: no reuse
    symbols -> phi_linear; no interpolated subcarriers -> phi_region_a.
    """
    delta, d_sym = int(delta_sub), int(delta_sym)
    if d_sym == 1 and delta == 1:
        return float(phi_lmmse_value)
    if d_sym == 1:
        return phi_linear(pdp, n_subcarriers, delta, phi_lmmse_value)
    if delta == 1:
        return phi_region_a(doppler, d_sym, phi_lmmse_value)
    rho_delta = float(_re_rho_f(pdp, n_subcarriers, delta)[0])
    const = _interp_constant(delta, rho_delta, phi_lmmse_value)
    cross = _interp_cross(pdp, n_subcarriers, delta)  # (delta-1,)
    rho_t = time_correlation(np.arange(1, d_sym), doppler)  # (d_sym-1,)
    double_sum = float(np.outer(rho_t, cross).sum())
    return float(const - 2.0 / ((d_sym - 1) * (delta - 1)) * double_sum)


def phi_edge_region_b(
    pdp, doppler, n_subcarriers: int, delta_sub: int, delta_sym: int,
    phi_lmmse_value: float,
) -> float:
    """Edge-extrapolated subcarriers on reuse symbols (diagnostic).

    Same structure as phi_edge with the pilot-to-target cross terms scaled
    by the time correlation; the pilot-to-pilot term is not, both pilots
    living on the same symbol.
    """
    delta, d_sym = int(delta_sub), int(delta_sym)
    if delta == 1:
        return phi_region_a(doppler, d_sym, phi_lmmse_value)
    if d_sym == 1:
        return phi_edge(pdp, n_subcarriers, delta, phi_lmmse_value)
    kd = np.arange(1, delta, dtype=float)
    a = -kd / delta
    b = (delta + kd) / delta
    rho_delta = float(_re_rho_f(pdp, n_subcarriers, delta)[0])
    rho_kd = _re_rho_f(pdp, n_subcarriers, kd)
    rho_dk = _re_rho_f(pdp, n_subcarriers, delta + kd)
    rho_t = time_correlation(np.arange(1, d_sym), doppler)
    per = (
        1.0
        + a * a
        + b * b
        + 2 * a * b * rho_delta
        + (a * a + b * b) * phi_lmmse_value
        - 2.0 * rho_t[:, None] * (a * rho_dk + b * rho_kd)
    )
    return float(per.mean())


@dataclass(frozen=True)
class MseBreakdown:
    """Closed-form MSE components and their grid averages.

    sigma_e2 is the headline average (edge folded into linear). sigma_e2_full
    keeps phi_edge distinct on pilot-carrying symbols; sigma_e2_grid
    additionally keeps the edge/reuse cross class distinct, making it the
    exact average for the uniform-window geometries. Both diagnostics are
    None when their extra components were not supplied.
    """

    phi_lmmse: float
    phi_linear: float
    phi_a: float
    phi_b: float
    sigma_e2: float
    phi_edge: float | None = None
    phi_edge_b: float | None = None
    sigma_e2_full: float | None = None
    sigma_e2_grid: float | None = None


def average_mse(
    grid: MiniSlotGrid,
    pattern: PilotPattern | None = None,
    *,
    phi_lmmse: float,
    phi_linear: float,
    phi_a: float,
    phi_b: float,
    phi_edge: float | None = None,
    phi_edge_b: float | None = None,
) -> MseBreakdown:
    """Combine MSE components into the grid-average sigma_e^2.

    Weights count resource elements over one pilot window of delta_sym
    symbols: lambda_p pilots and K - lambda_p interpolated positions on the
    pilot-carrying symbol, the same split scaled by (delta_sym - 1) on the
    reuse symbols, all over K * delta_sym.
    """
    if pattern is None:
        pattern = grid.pattern
    if pattern is None:
        raise ValueError("average_mse needs a pilot pattern")
    K = grid.n_subcarriers
    lam = K // pattern.delta_sub
    d_sym = pattern.delta_sym
    delta = pattern.delta_sub
    denom = K * d_sym
    sigma = (
        lam * phi_lmmse
        + (K - lam) * phi_linear
        + lam * (d_sym - 1) * phi_a
        + (K - lam) * (d_sym - 1) * phi_b
    ) / denom
    sigma_full = None
    sigma_grid = None
    if phi_edge is not None:
        n_edge = delta - 1
        sigma_full = (
            lam * phi_lmmse
            + (K - lam - n_edge) * phi_linear
            + n_edge * phi_edge
            + lam * (d_sym - 1) * phi_a
            + (K - lam) * (d_sym - 1) * phi_b
        ) / denom
        if phi_edge_b is not None:
            sigma_grid = (
                lam * phi_lmmse
                + (K - lam - n_edge) * phi_linear
                + n_edge * phi_edge
                + (d_sym - 1)
                * (lam * phi_a + (K - lam - n_edge) * phi_b + n_edge * phi_edge_b)
            ) / denom
    return MseBreakdown(
        phi_lmmse=float(phi_lmmse),
        phi_linear=float(phi_linear),
        phi_a=float(phi_a),
        phi_b=float(phi_b),
        sigma_e2=float(sigma),
        phi_edge=None if phi_edge is None else float(phi_edge),
        phi_edge_b=None if phi_edge_b is None else float(phi_edge_b),
        sigma_e2_full=None if sigma_full is None else float(sigma_full),
        sigma_e2_grid=None if sigma_grid is None else float(sigma_grid),
    )


def channel_estimation_mse(pdp, doppler, grid: MiniSlotGrid, gamma: float) -> MseBreakdown:
    """All closed-form components plus the grid averages for one geometry."""
    pattern = grid.pattern
    if pattern is None:
        raise ValueError("channel estimation needs a pilot pattern")
    K = grid.n_subcarriers
    cov = pilot_covariance(pdp, K, pattern.delta_sub)
    phi = phi_lmmse(cov, gamma)
    lin = phi_linear(pdp, K, pattern.delta_sub, phi)
    edge = phi_edge(pdp, K, pattern.delta_sub, phi)
    a = phi_region_a(doppler, pattern.delta_sym, phi)
    b = phi_region_b(pdp, doppler, K, pattern.delta_sub, pattern.delta_sym, phi)
    edge_b = phi_edge_region_b(
        pdp, doppler, K, pattern.delta_sub, pattern.delta_sym, phi
    )
    return average_mse(
        grid,
        pattern,
        phi_lmmse=phi,
        phi_linear=lin,
        phi_a=a,
        phi_b=b,
        phi_edge=edge,
        phi_edge_b=edge_b,
    )


def effective_snr(sigma_e2: float, sigma_w2: float) -> float:
    """Post-estimation SNR (1 - sigma_e^2) / (sigma_e^2 + sigma_w^2).

    Estimation error eats signal power and adds interference; sigma_e^2 = 0
    returns exactly 1/sigma_w^2 = gamma.
    """
    if sigma_w2 <= 0.0:
        raise ValueError("sigma_w^2 must be positive")
    if sigma_e2 < 0.0:
        raise ValueError("sigma_e^2 must be nonnegative")
    if sigma_e2 >= 1.0:
        raise EstimationCollapseError(
            f"sigma_e^2 = {sigma_e2:.4f} >= 1: estimates carry no signal"
        )
    return (1.0 - sigma_e2) / (sigma_e2 + sigma_w2)


# ---------------------------------------------------------------------------
# Empirical counterparts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MseMeasurement:
    """Empirical per-class MSE means with standard errors.

    sigma_e2 recombines the class means with the same weights as
    average_mse's headline formula; sigma_e2_grid is the straight average
    over all K*T grid positions (the true geometry, edge classes included).
    """

    phi_lmmse: float
    phi_lmmse_se: float
    phi_linear: float
    phi_linear_se: float
    phi_edge: float
    phi_edge_se: float
    phi_a: float
    phi_a_se: float
    phi_b: float
    phi_b_se: float
    phi_edge_b: float
    phi_edge_b_se: float
    sigma_e2: float
    sigma_e2_se: float
    sigma_e2_grid: float
    sigma_e2_grid_se: float
    n_realizations: int
    error_model: str


def measure_mse(
    pdp,
    doppler,
    grid: MiniSlotGrid,
    gamma: float,
    n_realizations: int,
    seed,
    error_model: str = "matched",
    chunk: int = 10_000,
) -> MseMeasurement:
    """Monte Carlo MSE per resource-element class.

    The pilot-stage class (phi_lmmse) always runs the honest LS -> LMMSE
    chain; its residual variance is phi_lmmse exactly, no modeling gap
    there. Downstream interpolation/reuse classes use the requested error
    model: 'matched' replaces the pilot error with white noise of variance
    phi_lmmse (the closed forms' premise), 'estimator' feeds the honest
    LMMSE estimates through instead.

    Each class is averaged per realization, then across realizations, which
    gives clean independent-sample standard errors.
    """
    if error_model not in ("matched", "estimator"):
        raise ValueError("error_model must be 'matched' or 'estimator'")
    pattern = grid.pattern
    if pattern is None:
        raise ValueError("measure_mse needs a pilot pattern")
    K, T = grid.n_subcarriers, grid.n_symbols
    delta = pattern.delta_sub
    lam = K // delta
    pilots = list(pattern.pilot_symbols)
    cov = pilot_covariance(pdp, K, delta)
    phi = phi_lmmse(cov, gamma)
    filt = _lmmse_filter(cov, gamma)
    rng = as_rng(seed)

    pilot_k = np.arange(0, K, delta)
    edge_k = np.arange((lam - 1) * delta + 1, K)
    interior_mask = np.ones(K, dtype=bool)
    interior_mask[pilot_k] = False
    interior_mask[edge_k] = False
    interior_k = np.flatnonzero(interior_mask)
    # nearest preceding pilot symbol and the reuse symbols per window
    window_of = {
        t: max(s for s in pilots if s <= t) for t in range(1, T + 1)
    }
    reuse_sym = [t for t in range(1, T + 1) if t not in pilots]

    per_class = {name: [] for name in
                 ("lmmse", "linear", "edge", "a", "b", "edge_b", "grid")}
    done = 0
    while done < n_realizations:
        n = min(chunk, n_realizations - done)
        H, _ = sample_channel_grids(pdp, doppler, K, T, n, rng)
        # honest pilot estimation at each pilot symbol
        err_l = []
        est_by_sym = {}
        for tp in pilots:
            h_p = H[:, pilot_k, tp - 1]  # (n, lam)
            noise = (
                rng.standard_normal((n, lam)) + 1j * rng.standard_normal((n, lam))
            ) * np.sqrt(0.5 / gamma)
            h_lmmse = (h_p + noise) @ filt.T
            err_l.append(np.abs(h_lmmse - h_p) ** 2)
            if error_model == "matched":
                e = (
                    rng.standard_normal((n, lam)) + 1j * rng.standard_normal((n, lam))
                ) * np.sqrt(phi / 2.0)
                est_by_sym[tp] = h_p + e
            else:
                est_by_sym[tp] = h_lmmse
        per_class["lmmse"].append(np.mean(np.concatenate(err_l, axis=1), axis=1))

        full_by_sym = {tp: interpolate_linear(est_by_sym[tp], delta) for tp in pilots}
        sq = np.empty((n, K, T))
        for t in range(1, T + 1):
            sq[:, :, t - 1] = np.abs(full_by_sym[window_of[t]] - H[:, :, t - 1]) ** 2
        p_idx = np.array(pilots) - 1
        r_idx = np.array(reuse_sym) - 1 if reuse_sym else np.array([], dtype=int)
        if interior_k.size:
            per_class["linear"].append(
                sq[:, interior_k][:, :, p_idx].mean(axis=(1, 2))
            )
        if edge_k.size:
            per_class["edge"].append(sq[:, edge_k][:, :, p_idx].mean(axis=(1, 2)))
        if r_idx.size:
            per_class["a"].append(sq[:, pilot_k][:, :, r_idx].mean(axis=(1, 2)))
            if interior_k.size:
                per_class["b"].append(
                    sq[:, interior_k][:, :, r_idx].mean(axis=(1, 2))
                )
            if edge_k.size:
                per_class["edge_b"].append(
                    sq[:, edge_k][:, :, r_idx].mean(axis=(1, 2))
                )
        per_class["grid"].append(sq.mean(axis=(1, 2)))
        done += n

    def reduce(name):
        if not per_class[name]:
            return np.nan, np.nan, None
        x = np.concatenate(per_class[name])
        return float(x.mean()), float(x.std(ddof=1) / np.sqrt(x.size)), x

    m_l, se_l, x_l = reduce("lmmse")
    m_lin, se_lin, x_lin = reduce("linear")
    m_e, se_e, _ = reduce("edge")
    m_a, se_a, x_a = reduce("a")
    m_b, se_b, x_b = reduce("b")
    m_eb, se_eb, _ = reduce("edge_b")
    m_g, se_g, _ = reduce("grid")

    # recombine per realization with the headline weights for a clean SE
    d_sym = pattern.delta_sym
    w = np.array([lam, K - lam, lam * (d_sym - 1), (K - lam) * (d_sym - 1)], float)
    w /= K * d_sym
    zeros = np.zeros_like(x_l)
    parts = [x_l,
             x_lin if x_lin is not None else zeros,
             x_a if x_a is not None else zeros,
             x_b if x_b is not None else zeros]
    combo = sum(wi * xi for wi, xi in zip(w, parts))
    m_c = float(combo.mean())
    se_c = float(combo.std(ddof=1) / np.sqrt(combo.size))

    return MseMeasurement(
        phi_lmmse=m_l, phi_lmmse_se=se_l,
        phi_linear=m_lin, phi_linear_se=se_lin,
        phi_edge=m_e, phi_edge_se=se_e,
        phi_a=m_a, phi_a_se=se_a,
        phi_b=m_b, phi_b_se=se_b,
        phi_edge_b=m_eb, phi_edge_b_se=se_eb,
        sigma_e2=m_c, sigma_e2_se=se_c,
        sigma_e2_grid=m_g, sigma_e2_grid_se=se_g,
        n_realizations=n_realizations,
        error_model=error_model,
    )
