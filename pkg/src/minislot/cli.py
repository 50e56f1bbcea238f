"""Batch front end: JSON-configured sweeps, scheme selection, crossover.

A scenario JSON configures the grid, channel, payload and sweep axes:

    {
      "K": 64, "T": 2, "deltaSub": 2, "highMobility": false,
      "pdp": {"L": 5, "decay": 1.0},
      "fdTs": [0.01, 0.1], "gammaDb": [0, 2, 4],
      "B": 64, "M": 4,
      "schemes": ["PA", "FDDi", "TDDi"],
      "nSamples": 1000000, "seed": 0
    }

fdTs and gammaDb accept a scalar or a finite ascending list; M accepts one
order or a per-scheme mapping. CLI flags override individual fields, and the
master seed resolves as --seed flag > FBL_SEED environment variable > config.

Every row derives its Monte Carlo substream from (master seed, scheme,
gammaDb) and deliberately not from fdTs: differential-in-frequency rows are
then bit-identical across the Doppler sweep (their channel correlation never
depended on it), and the other schemes see common random numbers along the
Doppler axis. Sweep points run sequentially in scenario order, so output is
deterministic byte for byte given (scenario, seed).

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field, replace

import numpy as np

from . import bounds as bounds_mod
from ._util import db_to_lin, lin_to_db
from .channel import DopplerSpec, exponential_pdp
from .chanest import EstimationCollapseError
from .fbl import (
    DiffChannelParams,
    InfeasiblePayloadError,
    fddi_correlation,
    sample_coherent_density,
    sample_diff_density,
    scheme_fbl,
    tddi_correlation,
)
from .grid import FDDI, PA, SCHEMES, TDDI, MiniSlotGrid, default_constellation, standard_pattern

__all__ = ["ConfigError", "Scenario", "Recommendation",
           "run_sweep", "select_scheme", "doppler_crossover", "selftest", "main"]

CSV_COLUMNS = (
    "scheme", "K", "T", "M", "fdTs", "gammaDb", "N", "R",
    "sigmaE2", "gammaHatDb", "I", "V",
    "epsilonNA", "epsilonIS", "epsilonISstderr", "epsilonDT", "epsilonDTstderr",
    "nSamples", "seed",
)

INFEASIBLE_MARKER = "INFEASIBLE_PAYLOAD"

# deterministic tie-break: lower reference overhead wins
_TIE_ORDER = {FDDI: 0, PA: 1, TDDI: 2}


class ConfigError(ValueError):
    """Scenario or flag validation failed."""


def _as_sweep(value, name: str) -> tuple:
    vals = [value] if np.isscalar(value) else list(value)
    if not vals:
        raise ConfigError(f"{name} sweep must not be empty")
    out = tuple(float(v) for v in vals)
    if any(b <= a for a, b in zip(out, out[1:])):
        raise ConfigError(f"{name} sweep must be strictly ascending")
    return out


@dataclass(frozen=True)
class Scenario:
    """One validated run configuration."""

    n_subcarriers: int = 64
    n_symbols: int = 2
    delta_sub: int = 2
    high_mobility: bool = False
    pdp_taps: int = 5
    pdp_decay: float = 1.0
    fd_ts: tuple = (0.01,)
    gamma_db: tuple = (2.0,)
    n_info_bits: int = 64
    orders: dict = field(default_factory=lambda: {s: 4 for s in SCHEMES})
    schemes: tuple = SCHEMES
    n_samples: int = 1_000_000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "fd_ts", _as_sweep(self.fd_ts, "fdTs"))
        object.__setattr__(self, "gamma_db", _as_sweep(self.gamma_db, "gammaDb"))
        object.__setattr__(self, "schemes", tuple(self.schemes))
        for s in self.schemes:
            if s not in SCHEMES:
                raise ConfigError(f"unknown scheme {s!r}; choose from {SCHEMES}")
        if isinstance(self.orders, dict):
            missing = [s for s in self.schemes if s not in self.orders]
            if missing:
                raise ConfigError(f"no modulation order given for {missing}")
        else:
            object.__setattr__(
                self, "orders", {s: int(self.orders) for s in SCHEMES}
            )
        if self.n_info_bits < 1:
            raise ConfigError("B must be >= 1")
        if self.n_samples < 10_000:
            raise ConfigError("nSamples must be >= 1e4")
        if self.seed < 0:
            raise ConfigError("seed must be a nonnegative integer")
        if any(fd < 0 for fd in self.fd_ts):
            raise ConfigError("fdTs must be >= 0")

    @classmethod
    def from_json(cls, doc: dict) -> "Scenario":
        known = {
            "K", "T", "deltaSub", "highMobility", "pdp", "fdTs", "gammaDb",
            "B", "M", "schemes", "nSamples", "seed",
        }
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {}
        if "K" in doc:
            kwargs["n_subcarriers"] = int(doc["K"])
        if "T" in doc:
            kwargs["n_symbols"] = int(doc["T"])
        if "deltaSub" in doc:
            kwargs["delta_sub"] = int(doc["deltaSub"])
        if "highMobility" in doc:
            kwargs["high_mobility"] = bool(doc["highMobility"])
        if "pdp" in doc:
            pdp = doc["pdp"]
            kwargs["pdp_taps"] = int(pdp.get("L", 5))
            kwargs["pdp_decay"] = float(pdp.get("decay", 1.0))
        if "fdTs" in doc:
            kwargs["fd_ts"] = doc["fdTs"]
        if "gammaDb" in doc:
            kwargs["gamma_db"] = doc["gammaDb"]
        if "B" in doc:
            kwargs["n_info_bits"] = int(doc["B"])
        if "M" in doc:
            m = doc["M"]
            kwargs["orders"] = (
                {k: int(v) for k, v in m.items()} if isinstance(m, dict) else int(m)
            )
        if "schemes" in doc:
            kwargs["schemes"] = tuple(doc["schemes"])
        if "nSamples" in doc:
            kwargs["n_samples"] = int(doc["nSamples"])
        if "seed" in doc:
            kwargs["seed"] = int(doc["seed"])
        try:
            return cls(**kwargs)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def build(self):
        """Grid and power delay profile for this scenario."""
        try:
            pattern = standard_pattern(
                self.n_symbols, self.high_mobility, self.delta_sub
            )
            grid = MiniSlotGrid(self.n_subcarriers, self.n_symbols, pattern)
            pdp = exponential_pdp(self.pdp_taps, self.pdp_decay)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.pdp_taps >= self.n_subcarriers:
            raise ConfigError("need K > L")
        return grid, pdp


def _row_seeds(master: int, scheme: str, gamma_db: float):
    """Per-row substreams keyed on (seed, scheme, gammaDb) but never fdTs."""
    gamma_key = int(round(gamma_db * 1e6)) + 10 ** 9  # nonnegative entropy word
    if gamma_key < 0:
        raise ConfigError(f"gammaDb={gamma_db} out of supported range")
    ss = np.random.SeedSequence([int(master), SCHEMES.index(scheme), gamma_key])
    return ss.spawn(2)


def _density_sampler(scheme: str, scenario: Scenario, grid, pdp, fd: float,
                     gamma: float, gamma_hat):
    order = scenario.orders[scheme]
    if scheme == PA:
        constellation = default_constellation(scheme, order)
        return lambda n, rng: sample_coherent_density(gamma_hat, constellation, n, rng)
    rho = (
        fddi_correlation(pdp, grid.n_subcarriers)
        if scheme == FDDI
        else tddi_correlation(DopplerSpec(fd))
    )
    params = DiffChannelParams(gamma=gamma, rho=rho, order=order)
    return lambda n, rng: sample_diff_density(params, n, rng)


def _fmt(x) -> str:
    if x is None or x == "":
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def run_sweep(scenario: Scenario, output_path=None, include_bounds: bool = False):
    """Run the full (scheme, fdTs, gammaDb) sweep; returns CSV text.

    One row per combination, schemes outermost. Bounds columns stay empty
    unless include_bounds is set (they dominate runtime). A payload that
    does not fit a scheme's data symbols gets an INFEASIBLE_PAYLOAD marker
    in its epsilonNA cell and the run continues.
    """
    grid, pdp = scenario.build()
    lines = [",".join(CSV_COLUMNS)]
    for scheme in scenario.schemes:
        order = scenario.orders[scheme]
        for gamma_db in scenario.gamma_db:
            iv_seed, bound_seed = _row_seeds(scenario.seed, scheme, gamma_db)
            gamma = db_to_lin(gamma_db)
            for fd in scenario.fd_ts:
                cells = {c: "" for c in CSV_COLUMNS}
                cells.update(
                    scheme=scheme, K=grid.n_subcarriers, T=grid.n_symbols,
                    M=order, fdTs=fd, gammaDb=gamma_db,
                    nSamples=scenario.n_samples, seed=scenario.seed,
                )
                try:
                    res = scheme_fbl(
                        scheme, grid, pdp, DopplerSpec(fd), gamma,
                        scenario.n_info_bits, order,
                        n_samples=scenario.n_samples, seed=iv_seed,
                    )
                except InfeasiblePayloadError:
                    from .grid import data_symbol_count

                    n = data_symbol_count(grid, scheme)
                    cells.update(N=n, R=scenario.n_info_bits / n,
                                 epsilonNA=INFEASIBLE_MARKER)
                    lines.append(",".join(_fmt(cells[c]) for c in CSV_COLUMNS))
                    continue
                cells.update(N=res.n, R=res.r, I=res.i, V=res.v,
                             epsilonNA=res.epsilon)
                if res.sigma_e2 is not None:
                    cells["sigmaE2"] = res.sigma_e2
                    cells["gammaHatDb"] = lin_to_db(res.gamma_hat)
                if include_bounds:
                    sampler = _density_sampler(
                        scheme, scenario, grid, pdp, fd, gamma, res.gamma_hat
                    )
                    blocks = bounds_mod.block_density_samples(
                        sampler, res.n, scenario.n_samples, bound_seed
                    )
                    lo = bounds_mod.is_lower_bound(
                        sampler, res.n, scenario.n_info_bits,
                        block_samples=blocks,
                    )
                    hi = bounds_mod.dt_upper_bound(
                        sampler, res.n, scenario.n_info_bits,
                        block_samples=blocks,
                    )
                    cells.update(
                        epsilonIS=lo.value, epsilonISstderr=lo.stderr,
                        epsilonDT=hi.value, epsilonDTstderr=hi.stderr,
                    )
                lines.append(",".join(_fmt(cells[c]) for c in CSV_COLUMNS))
    text = "\n".join(lines) + "\n"
    if output_path is not None:
        with open(output_path, "w", newline="") as fh:
            fh.write(text)
    return text


@dataclass(frozen=True)
class Recommendation:
    """Scheme ranking at one operating point."""

    chosen: str
    rationale: str
    ranked: tuple  # of (scheme, epsilon) pairs, best first
    excluded: tuple  # schemes whose payload did not fit

    def to_dict(self) -> dict:
        return {
            "chosen": self.chosen,
            "rationale": self.rationale,
            "ranked": [{"scheme": s, "epsilon": e} for s, e in self.ranked],
            "excluded": list(self.excluded),
        }


def _single_point(scenario: Scenario):
    if len(scenario.fd_ts) != 1 or len(scenario.gamma_db) != 1:
        raise ConfigError("this subcommand needs scalar fdTs and gammaDb")
    return scenario.fd_ts[0], scenario.gamma_db[0]


def select_scheme(scenario: Scenario) -> Recommendation:
    """Rank the requested schemes by predicted BLER at one operating point.

    Ties break FDDi > PA > TDDi (lower reference overhead first). The
    rationale names the dominant factor: payload when a scheme was excluded
    for rate > 1, Doppler when the pilot-assisted effective-SNR penalty
    exceeds 1 dB, overhead otherwise.
    """
    fd, gamma_db = _single_point(scenario)
    grid, pdp = scenario.build()
    gamma = db_to_lin(gamma_db)
    results = {}
    excluded = []
    for scheme in scenario.schemes:
        iv_seed, _ = _row_seeds(scenario.seed, scheme, gamma_db)
        try:
            results[scheme] = scheme_fbl(
                scheme, grid, pdp, DopplerSpec(fd), gamma,
                scenario.n_info_bits, scenario.orders[scheme],
                n_samples=scenario.n_samples, seed=iv_seed,
            )
        except InfeasiblePayloadError:
            excluded.append(scheme)
    if not results:
        raise ConfigError("payload infeasible for every requested scheme")
    ranked = sorted(
        ((s, r.epsilon) for s, r in results.items()),
        key=lambda it: (it[1], _TIE_ORDER[it[0]]),
    )
    chosen = ranked[0][0]
    if excluded:
        rationale = (
            f"payload: B={scenario.n_info_bits} does not fit "
            f"{', '.join(excluded)}; best remaining scheme wins"
        )
    else:
        pa = results.get(PA)
        penalty_db = (
            lin_to_db(gamma / pa.gamma_hat) if pa is not None and pa.gamma_hat else 0.0
        )
        if pa is not None and penalty_db >= 1.0:
            rationale = (
                f"Doppler: estimation costs the pilot-assisted scheme "
                f"{penalty_db:.2f} dB of effective SNR at fdTs={fd:g}"
            )
        else:
            rationale = (
                "overhead: estimation is accurate here, the ranking follows "
                "the rate/overhead trade of the schemes"
            )
    return Recommendation(
        chosen=chosen, rationale=rationale, ranked=tuple(ranked),
        excluded=tuple(excluded),
    )


def doppler_crossover(scenario: Scenario) -> dict:
    """Locate the smallest fdTs where the two schemes' BLER ordering flips.

    Runs the normal-approximation curves over the ascending fdTs sweep at a
    single gammaDb. No flip returns crossover None; more than one flip is
    reported as ambiguous with every flip point listed.
    """
    if len(scenario.schemes) != 2:
        raise ConfigError("crossover needs exactly two schemes")
    if len(scenario.gamma_db) != 1:
        raise ConfigError("crossover needs a scalar gammaDb")
    grid, pdp = scenario.build()
    gamma_db = scenario.gamma_db[0]
    gamma = db_to_lin(gamma_db)
    eps = {s: [] for s in scenario.schemes}
    for scheme in scenario.schemes:
        iv_seed, _ = _row_seeds(scenario.seed, scheme, gamma_db)
        for fd in scenario.fd_ts:
            try:
                res = scheme_fbl(
                    scheme, grid, pdp, DopplerSpec(fd), gamma,
                    scenario.n_info_bits, scenario.orders[scheme],
                    n_samples=scenario.n_samples, seed=iv_seed,
                )
            except InfeasiblePayloadError as exc:
                raise ConfigError(str(exc)) from exc
            eps[scheme].append(res.epsilon)
    s0, s1 = scenario.schemes
    diff = np.array(eps[s0]) - np.array(eps[s1])
    signs = np.sign(diff)
    flips = []
    prev = 0.0
    for fd, s in zip(scenario.fd_ts, signs):
        if s != 0.0 and prev != 0.0 and s != prev:
            flips.append(fd)
        if s != 0.0:
            prev = s
    ambiguous = len(flips) > 1
    return {
        "schemes": list(scenario.schemes),
        "gammaDb": gamma_db,
        "fdTs": list(scenario.fd_ts),
        "epsilon": {s: list(map(float, v)) for s, v in eps.items()},
        "crossover": None if (ambiguous or not flips) else flips[0],
        "flips": flips,
        "ambiguous": ambiguous,
    }


# ---------------------------------------------------------------------------
# Self test
# ---------------------------------------------------------------------------

def selftest(verbose: bool = True) -> bool:
    """Fast end-to-end invariant suite; True when everything passes."""
    from . import chanest, channel, fbl, modem

    checks = []

    def check(name, fn):
        try:
            fn()
            checks.append((name, True, ""))
        except Exception as exc:  # noqa: BLE001 - report, don't crash
            checks.append((name, False, f"{type(exc).__name__}: {exc}"))

    def correlations():
        pdp = exponential_pdp(5, 1.0)
        assert channel.time_correlation(0, 0.37) == 1.0
        for dk in range(-8, 9):
            r = channel.freq_correlation(dk, pdp, 64)
            assert abs(r) <= 1.0 + 1e-12
            assert np.isclose(r, np.conj(channel.freq_correlation(-dk, pdp, 64)))

    def roundtrip():
        rng = np.random.default_rng(7)
        v = np.exp(2j * np.pi * rng.integers(0, 8, size=(63, 2)) / 8)
        d = modem.differential_encode(v, FDDI)
        dec = modem.differential_detect(d.d, FDDI, 8)
        assert np.array_equal(
            dec.hard, np.round(np.angle(v) / (2 * np.pi / 8)).astype(int) % 8
        )

    def chain():
        pdp = exponential_pdp(5, 1.0)
        g = channel.sample_channel_grid(pdp, DopplerSpec(0.05), 64, 2, 11)
        d = np.exp(2j * np.pi * np.random.default_rng(3).random((64, 2)))
        za = modem.ofdm_time_domain_chain(d, g, 0.1, 13).z
        zb = modem.fast_rx(d, g, 0.1, 13).z
        assert np.max(np.abs(za - zb)) / np.max(np.abs(zb)) < 1e-9

    def closed_forms():
        assert chanest.effective_snr(0.0, 0.25) == 4.0
        assert fbl.awgn_capacity_dispersion(1.0) == (1.0, 0.75)
        c, v = fbl.awgn_capacity_dispersion(3.0)
        assert c == 2.0 and abs(v - 15.0 / 16.0) < 1e-15

    def na_monotone():
        eps = [
            fbl.normal_approx_bler(1.0, 0.75, 128, r)
            for r in np.linspace(0.2, 1.4, 13)
        ]
        assert all(b >= a for a, b in zip(eps, eps[1:]))

    def sandwich():
        pdp = exponential_pdp(5, 1.0)
        rho = np.real(channel.freq_correlation(1, pdp, 64))
        params = DiffChannelParams(gamma=db_to_lin(2.0), rho=rho, order=4)
        iv = fbl.diff_capacity_dispersion(params, 100_000, 123)
        n, b = 126, 49
        eps_na = fbl.normal_approx_bler(iv.i, iv.v, n, b / n)
        sampler = lambda m, rng: fbl.sample_diff_density(params, m, rng)
        blocks = bounds_mod.block_density_samples(sampler, n, 100_000, 321)
        lo = bounds_mod.is_lower_bound(sampler, n, b, block_samples=blocks)
        hi = bounds_mod.dt_upper_bound(sampler, n, b, block_samples=blocks)
        assert lo.value - 3 * lo.stderr <= eps_na <= hi.value + 3 * hi.stderr
        assert lo.value <= hi.value

    def determinism():
        scn = Scenario(
            n_subcarriers=64, n_symbols=2, fd_ts=(0.01,), gamma_db=(2.0,),
            n_info_bits=32, n_samples=20_000, seed=5,
        )
        assert run_sweep(scn) == run_sweep(scn)

    check("correlation symmetry and bounds", correlations)
    check("differential encode/detect roundtrip", roundtrip)
    check("time-domain chain equals fast path", chain)
    check("closed-form spot values", closed_forms)
    check("normal approximation monotone in rate", na_monotone)
    check("IS <= NA <= DT sandwich", sandwich)
    check("sweep determinism", determinism)

    ok = all(passed for _, passed, _ in checks)
    if verbose:
        for name, passed, msg in checks:
            line = f"selftest {'PASS' if passed else 'FAIL'}: {name}"
            if msg:
                line += f" ({msg})"
            print(line)
    return ok


# ---------------------------------------------------------------------------
# Argument parsing and entry point
# ---------------------------------------------------------------------------

def _add_override_flags(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=None,
                   help="master seed (overrides FBL_SEED and the config)")
    p.add_argument("--k", type=int, default=None, help="override K")
    p.add_argument("--t", type=int, default=None, help="override T")
    p.add_argument("--delta-sub", type=int, default=None, help="override deltaSub")
    p.add_argument("--high-mobility", type=int, choices=(0, 1), default=None,
                   help="override highMobility")
    p.add_argument("--taps", type=int, default=None, help="override pdp.L")
    p.add_argument("--decay", type=float, default=None, help="override pdp.decay")
    p.add_argument("--fd-ts", type=str, default=None,
                   help="override fdTs (comma-separated ascending list)")
    p.add_argument("--gamma-db", type=str, default=None,
                   help="override gammaDb (comma-separated ascending list)")
    p.add_argument("--b", type=int, default=None, help="override payload B")
    p.add_argument("--m", type=str, default=None,
                   help="override M: one order, or scheme=order pairs "
                        "(e.g. 'PA=16,FDDi=4')")
    p.add_argument("--schemes", type=str, default=None,
                   help="override schemes (comma-separated)")
    p.add_argument("--n-samples", type=int, default=None, help="override nSamples")


def _parse_float_list(text: str):
    return [float(x) for x in text.split(",") if x.strip() != ""]


def _apply_overrides(scenario: Scenario, args) -> Scenario:
    updates = {}
    if args.k is not None:
        updates["n_subcarriers"] = args.k
    if args.t is not None:
        updates["n_symbols"] = args.t
    if args.delta_sub is not None:
        updates["delta_sub"] = args.delta_sub
    if args.high_mobility is not None:
        updates["high_mobility"] = bool(args.high_mobility)
    if args.taps is not None:
        updates["pdp_taps"] = args.taps
    if args.decay is not None:
        updates["pdp_decay"] = args.decay
    if args.fd_ts is not None:
        updates["fd_ts"] = tuple(_parse_float_list(args.fd_ts))
    if args.gamma_db is not None:
        updates["gamma_db"] = tuple(_parse_float_list(args.gamma_db))
    if args.b is not None:
        updates["n_info_bits"] = args.b
    if args.m is not None:
        if "=" in args.m:
            orders = {}
            for part in args.m.split(","):
                k, _, v = part.partition("=")
                orders[k.strip()] = int(v)
            updates["orders"] = orders
        else:
            updates["orders"] = int(args.m)
    if args.schemes is not None:
        updates["schemes"] = tuple(s.strip() for s in args.schemes.split(","))
    if args.n_samples is not None:
        updates["n_samples"] = args.n_samples
    seed = args.seed
    if seed is None and "FBL_SEED" in os.environ:
        try:
            seed = int(os.environ["FBL_SEED"])
        except ValueError as exc:
            raise ConfigError("FBL_SEED must be an integer") from exc
    if seed is not None:
        updates["seed"] = seed
    if not updates:
        return scenario
    try:
        return replace(scenario, **updates)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _load_scenario(path: str, args) -> Scenario:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return _apply_overrides(Scenario.from_json(doc), args)


def _emit(text: str, output_path):
    if output_path is None:
        sys.stdout.write(text)
    else:
        with open(output_path, "w", newline="") as fh:
            fh.write(text)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="minislot",
        description="Finite-blocklength link analysis for mini-slot OFDM "
                    "(pilot-assisted vs differential schemes)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="scenario JSON -> CSV of BLER results")
    p_sweep.add_argument("config")
    p_sweep.add_argument("-o", "--output", required=True, help="CSV output path")
    p_sweep.add_argument("--bounds", action="store_true",
                         help="also compute IS/DT bounds (slow)")
    _add_override_flags(p_sweep)

    p_select = sub.add_parser("select", help="recommend a scheme at one point")
    p_select.add_argument("config")
    p_select.add_argument("-o", "--output", default=None, help="JSON output path")
    _add_override_flags(p_select)

    p_cross = sub.add_parser("crossover",
                             help="find the Doppler where two schemes swap")
    p_cross.add_argument("config")
    p_cross.add_argument("-o", "--output", default=None, help="JSON output path")
    _add_override_flags(p_cross)

    p_self = sub.add_parser("selftest", help="run the invariant suite")

    args = parser.parse_args(argv)
    try:
        if args.command == "selftest":
            return 0 if selftest() else 2
        scenario = _load_scenario(args.config, args)
        if args.command == "sweep":
            run_sweep(scenario, args.output, include_bounds=args.bounds)
            return 0
        if args.command == "select":
            rec = select_scheme(scenario)
            _emit(json.dumps(rec.to_dict(), indent=2, sort_keys=True) + "\n",
                  args.output)
            return 0
        if args.command == "crossover":
            rep = doppler_crossover(scenario)
            _emit(json.dumps(rep, indent=2, sort_keys=True) + "\n", args.output)
            return 0
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (EstimationCollapseError, InfeasiblePayloadError,
            FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
