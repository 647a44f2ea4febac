"""Command-line front-end emitting figure-ready CSV/JSON.

One flat configuration (flags, optionally seeded from a ``key = value``
config file) drives every subcommand.  Outputs are deterministic for a
given configuration and seed: floats are printed with 17 significant
digits, columns have a fixed order, and every file opens with a comment
block echoing the fully resolved configuration.

Exit codes: 0 success, 2 configuration error, 3 convergence error,
4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, fields

import numpy as np

from .attachment import NetworkConfig, attachment_profile
from .dimensioning import SystemConstants, max_bs_power, rate_density
from .dimensioning import coverage_curve as _coverage_curve
from .geometry import bs_density, equivalent_network_radius
from .interference import ocif_far_term, ocif_near_term, ocif_spatial_distribution
from .iopr import iopr_spatial_stats, iopr_total
from .montecarlo import SimResult, SimSpec, empirical_coverage, simulate
from .numerics import ConvergenceError
from .verification import run_all

__all__ = ["RunConfig", "main"]

OUTPUT_DIR_ENV = "BESTCELL_OUTDIR"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_VERIFY = 4

_UNSET = object()


@dataclass
class RunConfig:
    """Fully resolved run settings, one flat namespace for all commands.

    dB-valued knobs (``k0_db``, ``gamma_star_db``) are converted to
    linear units only when the core configuration objects are built, so
    the core stays free of unit conversions.  ``r_inf`` is kept as the
    user-facing token: ``inf``, ``grid`` (truncate the interference ring
    at the radius enclosing the simulated sites) or a radius in meters.
    """

    eta: float = 3.0
    sigma_db: float = 8.0
    k0_db: float = -10.0
    r0: float = 1.0
    rc: float = 1000.0
    marginal_terms: int | None = None
    r_inf: str = "inf"
    grid_points: int = 400
    n0: float = 4e-21
    bw: float = 5e6
    interference_ratio: float = 1e5
    n_subcarriers: int = 512
    gamma_star_db: float = 0.0
    alpha: float = 0.5
    sigma_n_sq: float | None = None
    p_cch: float = 1.0
    samples: int = 1_000_000
    seed: int = 0
    tiers: int = 3
    workers: int = 1
    bins: int = 40
    gamma_min_db: float = -10.0
    gamma_max_db: float = 20.0
    gamma_step_db: float = 1.0
    rc_list: str = "250,500,1000,2000"
    coverage_target: float = 0.9
    output: str | None = None
    format: str | None = None

    def network(self) -> NetworkConfig:
        return NetworkConfig(eta=self.eta, sigma_db=self.sigma_db,
                             k0=10.0 ** (self.k0_db / 10.0), r0=self.r0,
                             rc=self.rc, marginal_terms=self.marginal_terms)

    def system(self) -> SystemConstants:
        return SystemConstants(n0=self.n0, bw=self.bw,
                               interference_ratio=self.interference_ratio,
                               n_subcarriers=self.n_subcarriers,
                               gamma_star=10.0 ** (self.gamma_star_db / 10.0),
                               alpha=self.alpha, sigma_n_sq=self.sigma_n_sq,
                               p_cch=self.p_cch)

    def sim_spec(self) -> SimSpec:
        return SimSpec(cfg=self.network(), samples=self.samples,
                       seed=self.seed, tiers=self.tiers,
                       workers=self.workers, bins=self.bins)

    def resolve_r_inf(self, rc: float | None = None) -> float:
        token = self.r_inf.strip().lower()
        if token == "inf":
            return math.inf
        if token == "grid":
            return equivalent_network_radius(rc if rc is not None else self.rc,
                                             self.tiers)
        try:
            value = float(token)
        except ValueError:
            raise ValueError(
                f"r_inf must be 'inf', 'grid' or a radius in meters, "
                f"got {self.r_inf!r}") from None
        if not value > 0.0:
            raise ValueError("r_inf must be positive")
        return value

    def gamma_grid(self) -> np.ndarray:
        if self.gamma_step_db <= 0.0:
            raise ValueError("gamma_step_db must be positive")
        if self.gamma_max_db < self.gamma_min_db:
            raise ValueError("gamma_max_db must not be below gamma_min_db")
        n = int(round((self.gamma_max_db - self.gamma_min_db)
                      / self.gamma_step_db)) + 1
        return self.gamma_min_db + self.gamma_step_db * np.arange(n)

    def rc_values(self) -> list[float]:
        try:
            values = [float(tok) for tok in self.rc_list.split(",") if tok.strip()]
        except ValueError:
            raise ValueError(f"rc_list must be comma-separated radii in "
                             f"meters, got {self.rc_list!r}") from None
        if not values:
            raise ValueError("rc_list must name at least one radius")
        if any(v <= 0.0 for v in values):
            raise ValueError("rc_list radii must be positive")
        return values


def _conv_marginal(text: str):
    if text == "auto":
        return None
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"marginal_terms must be 2, 3 or 'auto', "
                         f"got {text!r}") from None


def _conv_auto_float(text: str):
    if text == "auto":
        return None
    return float(text)


def _conv_format(text: str):
    if text not in ("csv", "json"):
        raise ValueError(f"format must be 'csv' or 'json', got {text!r}")
    return text


#: key -> (converter, help); drives both the flags and the config file.
CONFIG_KEYS: dict[str, tuple] = {
    "eta": (float, "path-loss exponent (> 2)"),
    "sigma_db": (float, "shadowing standard deviation in dB"),
    "k0_db": (float, "near-field attenuation at r0, in dB"),
    "r0": (float, "near-field reference distance in meters"),
    "rc": (float, "cell radius in meters"),
    "marginal_terms": (_conv_marginal,
                       "attachment marginals: 2, 3 or 'auto'"),
    "r_inf": (str, "interference ring outer cutoff: 'inf', 'grid' or meters"),
    "grid_points": (int, "radial grid points for analytic curves"),
    "n0": (float, "noise power spectral density in W/Hz"),
    "bw": (float, "system bandwidth in Hz"),
    "interference_ratio": (float,
                           "design ratio of mean interference over noise"),
    "n_subcarriers": (int, "subcarriers sharing the noise bandwidth"),
    "gamma_star_db": (float, "SIR target in dB"),
    "alpha": (float, "own-cell orthogonality loss factor in [0, 1]"),
    "sigma_n_sq": (_conv_auto_float,
                   "receiver noise power in W, or 'auto' for n0*bw"),
    "p_cch": (float, "control-channel power in W"),
    "samples": (int, "Monte Carlo sample count"),
    "seed": (int, "Monte Carlo seed"),
    "tiers": (int, "hexagonal rings around the central site"),
    "workers": (int, "worker threads for the simulation"),
    "bins": (int, "radial bins for simulation summaries"),
    "gamma_min_db": (float, "lower end of the SIR sweep in dB"),
    "gamma_max_db": (float, "upper end of the SIR sweep in dB"),
    "gamma_step_db": (float, "SIR sweep step in dB"),
    "rc_list": (str, "comma-separated cell radii in meters"),
    "coverage_target": (float, "coverage goal in (0, 1) for ratedensity"),
    "output": (str, "output path ('-' for stdout)"),
    "format": (_conv_format, "output format: csv or json"),
}

COMMANDS = ("attach", "ocif", "iopr", "coverage", "pmax", "powerdensity",
            "ratedensity", "simulate", "verify")


def _parse_config_file(path: str) -> dict:
    overrides = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(
                    f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            try:
                overrides[key] = CONFIG_KEYS[key][0](value)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad value for "
                                 f"{key!r}: {exc}") from None
    return overrides


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE",
                        help="flat key = value config file applied before flags")
    for key, (conv, help_text) in CONFIG_KEYS.items():
        flag = "--" + key.replace("_", "-")
        common.add_argument(flag, dest=key, type=conv, default=_UNSET,
                            metavar=key.upper(), help=help_text)

    parser = argparse.ArgumentParser(
        prog="bestcell",
        description="Coverage and capacity of hexagonal cellular grids "
                    "under best-cell attachment.")
    sub = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        "attach": "attachment probability and mobile density vs radius",
        "ocif": "mean other-cell interference gain, analytic vs simulated",
        "iopr": "interference-over-own-power moments, analytic vs simulated",
        "coverage": "coverage vs SIR target, analytic vs simulated",
        "pmax": "maximum site power vs cell radius",
        "powerdensity": "transmit power per area vs cell radius",
        "ratedensity": "area rate density vs cell radius at a coverage goal",
        "simulate": "run the grid simulation and dump the result as JSON",
        "verify": "run the full analytic-vs-simulation check suite",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common], help=descriptions[name])
        if name == "simulate":
            p.add_argument("--raw", action="store_true",
                           help="include per-sample arrays in the dump")
    return parser


def _build_run_config(args: argparse.Namespace) -> RunConfig:
    data = {f.name: f.default for f in fields(RunConfig)}
    if args.config:
        data.update(_parse_config_file(args.config))
    for key in CONFIG_KEYS:
        value = getattr(args, key)
        if value is not _UNSET:
            data[key] = value
    return RunConfig(**data)


def _fmt(value) -> str:
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    return str(value)


def _config_items(rcfg: RunConfig, resolved_format: str,
                  include_workers: bool = True) -> list[tuple[str, str]]:
    items = []
    for f in fields(RunConfig):
        if f.name == "workers" and not include_workers:
            continue
        value = getattr(rcfg, f.name)
        if f.name == "format":
            value = resolved_format
        if value is None:
            text = "auto" if f.name in ("marginal_terms", "sigma_n_sq") else "-"
        else:
            text = _fmt(value)
        items.append((f.name, text))
    return items


def _resolve_output(rcfg: RunConfig, command: str, ext: str) -> str | None:
    if rcfg.output == "-":
        return None
    if rcfg.output is not None:
        return rcfg.output
    outdir = os.environ.get(OUTPUT_DIR_ENV)
    if outdir:
        return os.path.join(outdir, f"{command}.{ext}")
    return None


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def _render_csv(command: str, rcfg: RunConfig, columns, rows, extra) -> str:
    lines = [f"# bestcell {command}"]
    lines += [f"# {k} = {v}" for k, v in _config_items(rcfg, "csv")]
    lines += [f"# {k} = {_fmt(v)}" for k, v in extra]
    lines.append(",".join(columns))
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _render_json(command: str, rcfg: RunConfig, columns, rows, extra) -> str:
    obj = {
        "command": command,
        "config": dict(_config_items(rcfg, "json")),
        "derived": {k: v for k, v in extra},
        "columns": list(columns),
        "rows": [list(row) for row in rows],
    }
    return json.dumps(obj, indent=2) + "\n"


def _emit_table(rcfg: RunConfig, command: str, columns, rows, extra=()) -> int:
    fmt = rcfg.format or "csv"
    rows = [[(float(v) if isinstance(v, (float, np.floating)) else int(v))
             for v in row] for row in rows]
    if fmt == "csv":
        text = _render_csv(command, rcfg, columns, rows, extra)
    else:
        text = _render_json(command, rcfg, columns, rows, extra)
    _write(text, _resolve_output(rcfg, command, fmt))
    return EXIT_OK


def _cmd_attach(rcfg: RunConfig, args) -> int:
    cfg = rcfg.network()
    prof = attachment_profile(cfg, rcfg.grid_points)
    rows = list(zip(prof.rb, prof.rb / cfg.rc, prof.p_attach, prof.density,
                    prof.xi_bmax))
    extra = [("attached_fraction", prof.attached_fraction)]
    return _emit_table(rcfg, "attach",
                       ("rb_m", "rb_over_rc", "p_attach",
                        "mobile_density_per_m", "xi_bmax_db"),
                       rows, extra)


def _cmd_ocif(rcfg: RunConfig, args) -> int:
    cfg = rcfg.network()
    r_inf = rcfg.resolve_r_inf()
    sim = simulate(rcfg.sim_spec())
    centers = sim.bin_centers
    analytic = np.array([ocif_near_term(r, 1, cfg) + ocif_near_term(r, 2, cfg)
                         + ocif_far_term(r, cfg, r_inf) for r in centers])
    rows = list(zip(centers, centers / cfg.rc, analytic, sim.ocif_mean,
                    sim.ocif_se, sim.n_attached))
    curve = ocif_spatial_distribution(cfg, r_inf, n=rcfg.grid_points)
    extra = [("mu_g", curve.mu_g), ("mu_g_mc", sim.mu_g),
             ("mu_g_mc_se", sim.mu_g_se)]
    return _emit_table(rcfg, "ocif",
                       ("rb_m", "rb_over_rc", "ocif_analytic", "ocif_mc",
                        "mc_stderr", "n_attached"),
                       rows, extra)


def _cmd_iopr(rcfg: RunConfig, args) -> int:
    cfg = rcfg.network()
    r_inf = rcfg.resolve_r_inf()
    sim = simulate(rcfg.sim_spec())
    centers = sim.bin_centers
    fbar, fsq = iopr_total(centers, cfg, r_inf)
    curve = iopr_spatial_stats(cfg, r_inf=r_inf, n=rcfg.grid_points)
    rows = list(zip(centers, centers / cfg.rc, fbar, sim.f_mean, sim.f_se,
                    fsq, sim.f2_mean, sim.f2_se, sim.n_attached))
    extra = [("mu_f", curve.mu_f), ("mu_f_mc", sim.mu_f),
             ("mu_f_mc_se", sim.mu_f_se),
             ("sigma_f_sq", curve.sigma_f_sq),
             ("sigma_f_sq_mc", sim.sigma_f_sq)]
    return _emit_table(rcfg, "iopr",
                       ("rb_m", "rb_over_rc", "fbar_analytic", "fbar_mc",
                        "fbar_mc_stderr", "fsq_analytic", "fsq_mc",
                        "fsq_mc_stderr", "n_attached"),
                       rows, extra)


def _cmd_coverage(rcfg: RunConfig, args) -> int:
    cfg = rcfg.network()
    r_inf = rcfg.resolve_r_inf()
    gamma_db = rcfg.gamma_grid()
    analytic = _coverage_curve(gamma_db, cfg, r_inf=r_inf, n=rcfg.grid_points)
    sim = simulate(rcfg.sim_spec())
    mc, se = empirical_coverage(sim, gamma_db)
    rows = list(zip(gamma_db, analytic, mc, se))
    extra = [("attached_samples", int(len(sim.f)))]
    return _emit_table(rcfg, "coverage",
                       ("gamma_db", "coverage_analytic", "coverage_mc",
                        "mc_stderr"),
                       rows, extra)


def _cmd_pmax(rcfg: RunConfig, args) -> int:
    cfg = rcfg.network()
    sys_c = rcfg.system()
    rows = []
    for rc in rcfg.rc_values():
        r_inf = rcfg.resolve_r_inf(rc)
        pmax = max_bs_power(rc, cfg, sys_c, r_inf, n=rcfg.grid_points)
        rows.append((rc, pmax, pmax * bs_density(rc) * 1e6))
    return _emit_table(rcfg, "pmax",
                       ("rc_m", "pmax_w", "power_density_w_per_km2"), rows)


def _cmd_powerdensity(rcfg: RunConfig, args) -> int:
    cfg = rcfg.network()
    sys_c = rcfg.system()
    rows = []
    for rc in rcfg.rc_values():
        r_inf = rcfg.resolve_r_inf(rc)
        pmax = max_bs_power(rc, cfg, sys_c, r_inf, n=rcfg.grid_points)
        rows.append((rc, pmax * bs_density(rc) * 1e6))
    return _emit_table(rcfg, "powerdensity",
                       ("rc_m", "power_density_w_per_km2"), rows)


def _cmd_ratedensity(rcfg: RunConfig, args) -> int:
    cfg = rcfg.network()
    curve = rate_density(rcfg.coverage_target, rcfg.rc_values(), cfg,
                         rcfg.resolve_r_inf(), n=rcfg.grid_points)
    rows = [(rc, dens * 1e6, rate * 1e6, rate * rcfg.bw)
            for rc, dens, rate in zip(curve.rc, curve.cell_density,
                                      curve.rate_density)]
    extra = [("coverage_target", curve.coverage_target),
             ("gamma_star_db", curve.gamma_star_db),
             ("c_cell_bps_per_hz", curve.c_cell)]
    return _emit_table(rcfg, "ratedensity",
                       ("rc_m", "cell_density_per_km2",
                        "rate_density_bps_per_hz_per_km2",
                        "rate_density_bps_per_m2"),
                       rows, extra)


def _sim_to_json(rcfg: RunConfig, sim: SimResult, raw: bool) -> str:
    obj = {
        "command": "simulate",
        "config": dict(_config_items(rcfg, "json")),
        "n_sites": sim.n_sites,
        "bin_edges_m": sim.bin_edges.tolist(),
        "n_total": sim.n_total.tolist(),
        "n_attached": sim.n_attached.tolist(),
        "attach_freq": sim.attach_freq.tolist(),
        "attach_se": sim.attach_se.tolist(),
        "own_mean": sim.own_mean.tolist(),
        "own_se": sim.own_se.tolist(),
        "ocif_mean": sim.ocif_mean.tolist(),
        "ocif_se": sim.ocif_se.tolist(),
        "f_mean": sim.f_mean.tolist(),
        "f_se": sim.f_se.tolist(),
        "f2_mean": sim.f2_mean.tolist(),
        "f2_se": sim.f2_se.tolist(),
        "mu_f": sim.mu_f,
        "mu_f_se": sim.mu_f_se,
        "sigma_f_sq": sim.sigma_f_sq,
        "mu_g": sim.mu_g,
        "mu_g_se": sim.mu_g_se,
        "xi_mean_db": sim.xi_mean.tolist(),
        "xi_std_db": sim.xi_std.tolist(),
    }
    if raw:
        obj["raw"] = {
            "rb_m": sim.rb.tolist(),
            "f": sim.f.tolist(),
            "g_own": sim.g_own.tolist(),
            "ocif": sim.ocif.tolist(),
            "g_near1": sim.g_near1.tolist(),
            "g_near2": sim.g_near2.tolist(),
            "xi_own_db": sim.xi_own.tolist(),
        }
    return json.dumps(obj, indent=2) + "\n"


def _cmd_simulate(rcfg: RunConfig, args) -> int:
    if (rcfg.format or "json") != "json":
        raise ValueError("simulate emits json only")
    sim = simulate(rcfg.sim_spec())
    _write(_sim_to_json(rcfg, sim, args.raw),
           _resolve_output(rcfg, "simulate", "json"))
    return EXIT_OK


def _cmd_verify(rcfg: RunConfig, args) -> int:
    if rcfg.format is not None:
        raise ValueError("verify prints a fixed text report; "
                         "format does not apply")
    report = run_all(seed=rcfg.seed, samples=rcfg.samples,
                     workers=rcfg.workers, bins=rcfg.bins, rc=rcfg.rc,
                     tiers=rcfg.tiers)
    # worker count deliberately left out: results must not depend on it
    header = ["# bestcell verify"]
    header += [f"# {k} = {v}"
               for k, v in _config_items(rcfg, "-", include_workers=False)]
    text = "\n".join(header) + "\n" + report.format()
    sys.stdout.write(text)
    path = _resolve_output(rcfg, "verify", "txt")
    if path is not None:
        _write(text, path)
    return EXIT_OK if report.passed else EXIT_VERIFY


_HANDLERS = {
    "attach": _cmd_attach,
    "ocif": _cmd_ocif,
    "iopr": _cmd_iopr,
    "coverage": _cmd_coverage,
    "pmax": _cmd_pmax,
    "powerdensity": _cmd_powerdensity,
    "ratedensity": _cmd_ratedensity,
    "simulate": _cmd_simulate,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        rcfg = _build_run_config(args)
        return _HANDLERS[args.command](rcfg, args)
    except ConvergenceError as exc:
        print(f"error: integration failed: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
