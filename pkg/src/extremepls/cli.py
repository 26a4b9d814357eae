"""Command-line entry point.

Subcommands: simulate, estimate, hill, benchmark, and the ghcn group
(stations, extract, triplets, benchmark). Configs come in as flags or JSON
files; bulk numerics leave as CSV, single results as JSON — the documented
contract consumed by the plotting component.

Exit codes: 0 success, 1 usage error, 2 data/config error, 3 numerical
degeneracy. Every failure prints one structured diagnostic line to stderr.
Each output directory receives exactly one run_manifest.json; its
wall-clock timestamp is the only output byte that may differ between
identical runs. The environment variable EPLS_SEED overrides the base seed
of any subcommand that draws randomness.
"""

from __future__ import annotations

import argparse
import glob
import json
import os
import sys

import numpy as np

from . import ghcn as ghcnmod
from . import sampleio
from .errors import (
    ConfigError,
    DataError,
    DegenerateDirectionError,
    InsufficientTailError,
    UsageError,
)
from .estimator import epls_direction, select_threshold
from .generators import (
    ArmaParams,
    BurrParams,
    EstarParams,
    GarchParams,
    GeneratorConfig,
    assemble_sample,
)
from .masking import MaskConfig, gen_bar_mask
from .montecarlo import (
    DESK_REPS,
    catalog_panels,
    default_k_grid,
    rank_methods,
    replication_seeds,
    run_panel,
    tailcov_curve,
)
from .tailstats import PlateauSettings, detect_plateau, hill_curve

SETUP_ALIASES = {
    "iid": "IidIid",
    "arma-garch": "ArmaRespGarchNoise",
    "garch-arma": "GarchRespArmaNoise",
    "estar-garch": "EstarRespGarchNoise",
}

_DEFAULT_RESP = {
    "arma-garch": {"phi": 0.8, "theta": -0.3},
    "garch-arma": {"omega": 0.05, "alpha": 0.1, "beta": 0.85},
    "estar-garch": {"phi_low": 0.2, "phi_high": 0.95},
}
_DEFAULT_NOISE = {
    "arma-garch": {"omega": 0.05, "alpha": 0.1, "beta": 0.85},
    "garch-arma": {"phi": 0.8, "theta": -0.3},
    "estar-garch": {"omega": 0.05, "alpha": 0.1, "beta": 0.85},
}


class _Parser(argparse.ArgumentParser):
    """argparse maps its own failures to exit 2; the contract reserves 2
    for data errors, so parser failures become UsageError (exit 1)."""

    def error(self, message):
        raise UsageError(message)


def _diag(category: str, exc: Exception) -> None:
    line = json.dumps(
        {"error": category, "type": type(exc).__name__, "detail": str(exc)},
        sort_keys=True,
    )
    print(line, file=sys.stderr)


def _base_seed(flag_value: int) -> int:
    env = os.environ.get("EPLS_SEED")
    if env is None:
        return int(flag_value)
    try:
        return int(env)
    except ValueError as exc:
        raise UsageError(f"EPLS_SEED must be an integer, got {env!r}") from exc


def _param_obj(setup_alias: str, which: str, override: str | None):
    """Build the resp/noise parameter dataclass for a simulate call."""
    if setup_alias == "iid":
        if override:
            raise UsageError("the iid setup takes no recursion parameters")
        return None
    defaults = (_DEFAULT_RESP if which == "resp" else _DEFAULT_NOISE)[setup_alias]
    values = dict(defaults)
    if override:
        try:
            user = json.loads(override)
        except json.JSONDecodeError as exc:
            raise UsageError(f"--{which}-params must be JSON: {exc}") from exc
        unknown = set(user) - set(defaults)
        if unknown:
            raise UsageError(f"unknown {which} parameter(s) {sorted(unknown)} for setup {setup_alias}")
        values.update(user)
    if "phi" in values and "theta" in values:
        return ArmaParams(**values)
    if "omega" in values:
        return GarchParams(**values)
    return EstarParams(**values)


def _parse_alphas(text: str) -> tuple:
    """Either 'start:stop:step' (inclusive) or a comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"--alphas range must be start:stop:step, got {text!r}")
        try:
            start, stop, step = (float(v) for v in parts)
        except ValueError as exc:
            raise UsageError(f"--alphas values must be numeric: {text!r}") from exc
        if step <= 0 or stop < start:
            raise UsageError(f"--alphas range must increase, got {text!r}")
        count = int(round((stop - start) / step)) + 1
        alphas = tuple(round(start + i * step, 10) for i in range(count))
    else:
        try:
            alphas = tuple(float(v) for v in text.split(",") if v)
        except ValueError as exc:
            raise UsageError(f"--alphas values must be numeric: {text!r}") from exc
    if not alphas or any(not 0 < a < 1 for a in alphas):
        raise UsageError(f"alphas must lie in (0, 1), got {text!r}")
    return alphas


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_simulate(args) -> int:
    seed = _base_seed(args.seed)
    alias = args.setup
    resp = _param_obj(alias, "resp", args.resp_params)
    noise = _param_obj(alias, "noise", args.noise_params)
    config = GeneratorConfig(
        setup=SETUP_ALIASES[alias],
        burr=BurrParams(gamma=args.gamma, rho=args.rho),
        kappa=args.kappa,
        n=args.n,
        p=args.p,
        seed=seed,
        resp_params=resp,
        noise_params=noise,
        rho_c=args.rho_c,
        burn_in=args.burn_in,
    )
    sample = assemble_sample(config)
    lam = None
    mask_meta = None
    if args.tau is not None:
        alpha_bar = args.alpha_bar if args.alpha_bar is not None else (0.0 if alias == "iid" else 0.5)
        mask_config = MaskConfig(tau=args.tau, alpha_bar=alpha_bar)
        _, mask_seed = replication_seeds(seed, 0)
        lam = gen_bar_mask(sample.y, mask_config, np.random.default_rng(mask_seed), p=args.p).lam
        mask_meta = {"tau": args.tau, "alpha_bar": alpha_bar, "mask_seed": mask_seed}
    os.makedirs(args.out, exist_ok=True)
    sampleio.write_sample_csv(os.path.join(args.out, "sample.csv"), sample, lam)
    sampleio.write_manifest(
        args.out,
        "simulate",
        {
            "setup": alias,
            "gamma": args.gamma,
            "rho": args.rho,
            "kappa": args.kappa,
            "rho_c": args.rho_c,
            "n": args.n,
            "p": args.p,
            "seed": seed,
            "burn_in": args.burn_in,
            "resp_params": None if resp is None else vars(resp),
            "noise_params": None if noise is None else vars(noise),
            "mask": mask_meta,
        },
    )
    print(f"wrote {os.path.join(args.out, 'sample.csv')} (n={args.n}, p={args.p})")
    return 0


def _cmd_estimate(args) -> int:
    sample, lam = sampleio.read_sample_csv(args.input)
    if args.auto:
        sel = select_threshold(sample.x, sample.y, lam)
        direction = epls_direction(sample.x, sample.y, lam, k=sel.k_hat)
        direction.diagnostics["k_grid_size"] = len(sel.k_grid)
    elif args.k is not None:
        direction = epls_direction(sample.x, sample.y, lam, k=args.k)
    else:
        direction = epls_direction(sample.x, sample.y, lam, threshold=args.threshold)
    if args.out is None:
        payload = {
            "method": direction.method,
            "k": direction.k,
            "threshold": direction.threshold,
            "beta_hat": [float(v) for v in direction.beta_hat],
            "diagnostics": sampleio._jsonable(direction.diagnostics),
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        out_dir = os.path.dirname(os.path.abspath(args.out)) or "."
        os.makedirs(out_dir, exist_ok=True)
        sampleio.write_direction_json(args.out, direction)
        sampleio.write_manifest(
            out_dir,
            "estimate",
            {"input": os.path.abspath(args.input), "auto": args.auto, "k": args.k, "threshold": args.threshold},
        )
        print(f"wrote {args.out} (k={direction.k}, threshold={direction.threshold:.6g})")
    return 0


def _cmd_hill(args) -> int:
    sample, _ = sampleio.read_sample_csv(args.input)
    hill = hill_curve(sample.y, k_max=args.k_max)
    plateau = detect_plateau(hill, PlateauSettings())
    payload = {
        "hill": [float(v) for v in hill],
        "plateau": None
        if plateau is None
        else {"k_start": plateau.k_start, "k_end": plateau.k_end, "gamma_mean": plateau.gamma_mean},
        "gamma_mean": None if plateau is None else plateau.gamma_mean,
    }
    if args.out is None:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        out_dir = os.path.dirname(os.path.abspath(args.out)) or "."
        os.makedirs(out_dir, exist_ok=True)
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        sampleio.write_manifest(out_dir, "hill", {"input": os.path.abspath(args.input), "k_max": args.k_max})
        print(f"wrote {args.out}")
    return 0


def _select_panels(config: dict):
    panels = catalog_panels()
    schemes = config.get("schemes")
    gammas = config.get("gammas")
    taus = config.get("taus")
    if schemes:
        panels = [p for p in panels if p.scheme in set(schemes)]
    if gammas:
        panels = [p for p in panels if any(abs(p.gamma - g) < 1e-12 for g in gammas)]
    if taus:
        panels = [p for p in panels if any(abs(p.tau - t) < 1e-12 for t in taus)]
    if not panels:
        raise ConfigError("panel selection matched nothing in the catalog")
    return panels


def _cmd_benchmark(args) -> int:
    config: dict = {}
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                config = json.load(fh)
        except FileNotFoundError as exc:
            raise DataError(f"config file not found: {args.config}") from exc
        except json.JSONDecodeError as exc:
            raise DataError(f"config is not valid JSON: {exc}") from exc
    n = int(args.n if args.n is not None else config.get("n", 500))
    p = int(args.p if args.p is not None else config.get("p", 101))
    reps = int(args.reps if args.reps is not None else config.get("reps", DESK_REPS))
    seed = _base_seed(args.seed if args.seed is not None else config.get("seed", 0))
    do_rank = bool(config.get("rank", True))
    raw_alphas = config.get("alphas", ())
    if isinstance(raw_alphas, str):
        # the config file accepts the same range syntax as the ghcn
        # --alphas flag, but a bad value there is a config error, not usage
        try:
            alphas = _parse_alphas(raw_alphas)
        except UsageError as exc:
            raise ConfigError(str(exc)) from exc
    else:
        alphas = tuple(float(a) for a in raw_alphas) or _parse_alphas("0.90:0.99:0.01")

    panels = _select_panels(config)
    os.makedirs(args.out, exist_ok=True)

    rank_datasets = []
    for panel in panels:
        gen_config = panel.generator_config(n=n, p=p, seed=seed)
        result = run_panel(gen_config, panel.mask_config(), reps=reps, jobs=args.jobs)
        path = os.path.join(args.out, f"panel_{panel.label}.csv")
        sampleio.write_panel_csv(path, result)
        kept = reps - len(result.excluded)
        print(f"panel {panel.label}: reps={kept}/{reps} median_cosine={result.median_cosine:.4f}")
        if do_rank:
            sample_seed, mask_seed = replication_seeds(seed, 0)
            sample = assemble_sample(
                GeneratorConfig(
                    setup=gen_config.setup,
                    burr=gen_config.burr,
                    kappa=gen_config.kappa,
                    n=n,
                    p=p,
                    seed=sample_seed,
                    resp_params=gen_config.resp_params,
                    noise_params=gen_config.noise_params,
                    rho_c=gen_config.rho_c,
                    burn_in=gen_config.burn_in,
                )
            )
            lam = gen_bar_mask(sample.y, panel.mask_config(), np.random.default_rng(mask_seed), p=p).lam
            rank_datasets.append((panel.label, sample.x, sample.y, lam))

    if do_rank and rank_datasets:
        table = rank_methods(rank_datasets, alphas, seed=seed)
        sampleio.write_ranks_csv(os.path.join(args.out, "ranks.csv"), table)
        sampleio.write_mean_rank_csv(os.path.join(args.out, "mean_rank.csv"), table)
        sampleio.write_random_band_csv(os.path.join(args.out, "random_band.csv"), table)
        curve_rows = []
        k_grid = config.get("curve_ks")
        for name, x, y, lam in rank_datasets:
            rows, _ = tailcov_curve(name, x, y, lam, k_grid=k_grid, seed=seed)
            curve_rows.extend(rows)
        sampleio.write_tailcov_curve_csv(os.path.join(args.out, "tailcov_curve.csv"), curve_rows)
        print(f"ranked {len(rank_datasets)} dataset(s) over {len(alphas)} tail levels")

    sampleio.write_manifest(
        args.out,
        "benchmark",
        {
            "n": n,
            "p": p,
            "reps": reps,
            "seed": seed,
            "jobs": args.jobs,
            "panels": [panel.label for panel in panels],
            "alphas": list(alphas),
            "rank": do_rank,
        },
    )
    return 0


def _cmd_ghcn_stations(args) -> int:
    try:
        with open(args.inventory, "r", encoding="utf-8") as fh:
            text = fh.read()
    except FileNotFoundError as exc:
        raise DataError(f"inventory not found: {args.inventory}") from exc
    stations, issues = ghcnmod.parse_stations(text)
    keywords = ghcnmod.DEFAULT_KEYWORDS if args.keywords is None else tuple(
        kw for kw in args.keywords.split(",") if kw
    )
    kept = ghcnmod.filter_stations(stations, state=args.state, keywords=keywords)
    lines = ["id,lat,lon,elevation,state,name"]
    for s in kept:
        lines.append(f"{s.id},{s.lat:.4f},{s.lon:.4f},{s.elevation:.1f},{s.state},{s.name}")
    body = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(body)
    else:
        out_dir = os.path.dirname(os.path.abspath(args.out)) or "."
        os.makedirs(out_dir, exist_ok=True)
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(body)
        print(f"wrote {args.out}: {len(kept)} station(s), {len(issues)} parse issue(s)")
    return 0


def _iter_dly_fragments(dly_dir: str, elements: tuple):
    paths = sorted(glob.glob(os.path.join(dly_dir, "*.dly")))
    if not paths:
        raise DataError(f"no .dly files under {dly_dir}")
    all_fragments, all_issues = [], []
    for path in paths:
        with open(path, "r", encoding="utf-8") as fh:
            fragments, issues = ghcnmod.parse_dly(fh.read(), elements=elements)
        all_fragments.extend(fragments)
        all_issues.extend(issues)
    return all_fragments, all_issues


def _cmd_ghcn_extract(args) -> int:
    elements = tuple(e for e in args.elements.split(",") if e)
    for element in elements:
        if element not in ghcnmod.ELEMENTS:
            raise UsageError(f"unsupported element {element!r}; supported: {ghcnmod.ELEMENTS}")
    fragments, issues = _iter_dly_fragments(args.dly_dir, elements)
    keys = sorted({(f.station_id, f.element) for f in fragments})
    series_list = [
        ghcnmod.assemble_series(fragments, sid, element, args.date_from, args.date_to)
        for sid, element in keys
    ]
    out_dir = os.path.dirname(os.path.abspath(args.out)) or "."
    os.makedirs(out_dir, exist_ok=True)
    ghcnmod.write_series_csv(series_list, args.out)
    sampleio.write_manifest(
        out_dir,
        "ghcn extract",
        {
            "dly_dir": os.path.abspath(args.dly_dir),
            "elements": list(elements),
            "from": args.date_from,
            "to": args.date_to,
        },
    )
    print(f"wrote {args.out}: {len(series_list)} series, {len(issues)} parse issue(s)")
    return 0


def _cmd_ghcn_triplets(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    except FileNotFoundError as exc:
        raise DataError(f"config file not found: {args.config}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"config is not valid JSON: {exc}") from exc
    for key in ("inventory", "dly_dir", "from", "to"):
        if key not in config:
            raise ConfigError(f"ghcn triplets config must set {key!r}")

    with open(config["inventory"], "r", encoding="utf-8") as fh:
        stations, _ = ghcnmod.parse_stations(fh.read())
    keywords = tuple(config.get("keywords", ghcnmod.DEFAULT_KEYWORDS))
    kept = ghcnmod.filter_stations(
        stations,
        state=config.get("state"),
        keywords=keywords,
        bbox=tuple(config["bbox"]) if "bbox" in config else None,
    )
    kept_ids = {s.id for s in kept}

    fragments, _ = _iter_dly_fragments(config["dly_dir"], ghcnmod.ELEMENTS)
    fragments = [f for f in fragments if f.station_id in kept_ids]
    date_from, date_to = config["from"], config["to"]
    y_max_missing = float(config.get("y_max_missing", 0.01))
    x_missing_range = tuple(config.get("x_missing_range", (0.05, 0.20)))

    prcp_ids = sorted({f.station_id for f in fragments if f.element == "PRCP"})
    tmax_ids = sorted({f.station_id for f in fragments if f.element == "TMAX"})
    y_retained = []
    for sid in prcp_ids:
        series = ghcnmod.assemble_series(fragments, sid, "PRCP", date_from, date_to)
        try:
            verdict = ghcnmod.completeness_filters(series, y_max_missing=y_max_missing)
        except DataError:
            continue
        if verdict.eligible:
            y_retained.append(verdict.retained)
    tmax_series = {
        sid: ghcnmod.assemble_series(fragments, sid, "TMAX", date_from, date_to) for sid in tmax_ids
    }

    settings_cfg = config.get("admissibility", {})
    settings = ghcnmod.AdmissibilitySettings(
        x_missing_range=x_missing_range,
        n_windows=int(settings_cfg.get("n_windows", 4)),
        stationarity_p_min=float(settings_cfg.get("stationarity_p_min", 0.05)),
        drift_window=int(settings_cfg.get("drift_window", 100)),
        drift_mult=settings_cfg.get("drift_mult", 3.0),
        corr_window=int(settings_cfg.get("corr_window", 100)),
        corr_min_joint=int(settings_cfg.get("corr_min_joint", 10)),
        corr_range_max=settings_cfg.get("corr_range_max", 1.0),
        hill_gamma_min=float(settings_cfg.get("hill_gamma_min", 0.2)),
    )

    possible = 0
    admissible = []
    gate_counts: dict = {}
    for y_series in y_retained:
        # a station may supply both the response and one covariate column
        x_eligible = []
        for sid in tmax_ids:
            verdict = ghcnmod.completeness_filters(
                tmax_series[sid],
                reference_dates=y_series.dates,
                x_missing_range=x_missing_range,
            )
            if verdict.eligible:
                x_eligible.append(tmax_series[sid])
        triplets = ghcnmod.build_triplets([y_series], x_eligible)
        possible += len(triplets)
        for triplet in triplets:
            verdict = ghcnmod.admissibility_pipeline(triplet, settings)
            if verdict.passed:
                admissible.append(triplet)
            else:
                gate_counts[verdict.failed_gate] = gate_counts.get(verdict.failed_gate, 0) + 1

    max_out = config.get("max_triplets")
    written = admissible if max_out is None else admissible[: int(max_out)]
    os.makedirs(args.out, exist_ok=True)
    for triplet in written:
        ghcnmod.write_triplet_csv(triplet, os.path.join(args.out, f"triplet_{triplet.name}.csv"))
    summary = {
        "stations_inventory": len(stations),
        "stations_filtered": len(kept),
        "prcp_eligible": len(y_retained),
        "triplets_possible": possible,
        "triplets_admissible": len(admissible),
        "triplets_written": len(written),
        "rejections_by_gate": gate_counts,
    }
    with open(os.path.join(args.out, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    sampleio.write_manifest(args.out, "ghcn triplets", {"config": config})
    print(
        f"triplets: {possible} possible, {len(admissible)} admissible, "
        f"{len(written)} written to {args.out}"
    )
    return 0


def _cmd_ghcn_benchmark(args) -> int:
    paths = sorted(glob.glob(os.path.join(args.triplets, "triplet_*.csv")))
    if not paths:
        raise DataError(f"no triplet_*.csv files under {args.triplets}")
    seed = _base_seed(args.seed)
    datasets = []
    for path in paths:
        name = os.path.splitext(os.path.basename(path))[0].removeprefix("triplet_")
        triplet = ghcnmod.read_triplet_csv(path, name=name)
        datasets.append((name, triplet.x, triplet.y, triplet.lam))
    alphas = _parse_alphas(args.alphas)
    table = rank_methods(datasets, alphas, seed=seed)
    out_dir = os.path.dirname(os.path.abspath(args.out)) or "."
    os.makedirs(out_dir, exist_ok=True)
    sampleio.write_ranks_csv(args.out, table)
    stem = os.path.splitext(args.out)[0]
    sampleio.write_mean_rank_csv(stem + "_mean.csv", table)
    sampleio.write_random_band_csv(stem + "_band.csv", table)
    curve_rows = []
    for name, x, y, lam in datasets:
        rows, _ = tailcov_curve(name, x, y, lam, k_grid=default_k_grid(y.size), seed=seed)
        curve_rows.extend(rows)
    sampleio.write_tailcov_curve_csv(stem + "_curve.csv", curve_rows)
    sampleio.write_manifest(
        out_dir,
        "ghcn benchmark",
        {"triplets": os.path.abspath(args.triplets), "alphas": list(alphas), "seed": seed},
    )
    print(f"wrote {args.out}: {len(datasets)} dataset(s), {len(table.skipped)} skipped cell(s)")
    return 0


# ---------------------------------------------------------------------------
# parser assembly
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="epls", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="simulate one sample (and optionally its mask)")
    sim.add_argument("--setup", choices=sorted(SETUP_ALIASES), required=True)
    sim.add_argument("--gamma", type=float, required=True, help="tail index of the response innovations")
    sim.add_argument("--rho", type=float, default=-1.0, help="second-order regular-variation parameter")
    sim.add_argument("--kappa", type=float, default=0.5, help="link exponent of g(y) = |y|^kappa")
    sim.add_argument("--rho-c", type=float, default=0.8, dest="rho_c")
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--p", type=int, required=True)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--burn-in", type=int, default=500, dest="burn_in")
    sim.add_argument("--resp-params", dest="resp_params", help="JSON override of the response recursion parameters")
    sim.add_argument("--noise-params", dest="noise_params", help="JSON override of the noise recursion parameters")
    sim.add_argument("--tau", type=float, help="mask decay exponent; omit for a fully observed sample")
    sim.add_argument(
        "--alpha-bar",
        type=float,
        dest="alpha_bar",
        help="mask serial dependence (default 0 for iid, 0.5 otherwise)",
    )
    sim.add_argument("--out", required=True, help="output directory")
    sim.set_defaults(func=_cmd_simulate)

    est = sub.add_parser("estimate", help="estimate the tail direction from a sample CSV")
    est.add_argument("--input", required=True)
    group = est.add_mutually_exclusive_group(required=True)
    group.add_argument("--threshold", type=float, help="estimate above this fixed response level")
    group.add_argument("--k", type=int, help="estimate above the k-th largest response")
    group.add_argument("--auto", action="store_true", help="pick k by tail-covariance maximization")
    est.add_argument("--out", help="output JSON path (default: print to stdout)")
    est.set_defaults(func=_cmd_estimate)

    hill = sub.add_parser("hill", help="Hill curve and plateau of the response column")
    hill.add_argument("--input", required=True)
    hill.add_argument("--k-max", type=int, dest="k_max")
    hill.add_argument("--out", help="output JSON path (default: print to stdout)")
    hill.set_defaults(func=_cmd_hill)

    bench = sub.add_parser("benchmark", help="run simulation panels and the method-ranking harness")
    bench.add_argument("--config", help="JSON config (panel selection, reps, seeds, alphas)")
    bench.add_argument("--out", required=True, help="output directory")
    bench.add_argument("--jobs", type=int, default=1)
    bench.add_argument("--n", type=int)
    bench.add_argument("--p", type=int)
    bench.add_argument("--reps", type=int)
    bench.add_argument("--seed", type=int)
    bench.set_defaults(func=_cmd_benchmark)

    ghcn = sub.add_parser("ghcn", help="climate archive ingestion and benchmarking")
    ghcn_sub = ghcn.add_subparsers(dest="ghcn_command", required=True)

    st = ghcn_sub.add_parser("stations", help="filter the station inventory")
    st.add_argument("--inventory", required=True)
    st.add_argument("--state")
    st.add_argument("--keywords", help="comma-separated name keywords (default: institutional set)")
    st.add_argument("--out", help="output CSV (default: print to stdout)")
    st.set_defaults(func=_cmd_ghcn_stations)

    ex = ghcn_sub.add_parser("extract", help="parse .dly files into an aligned long-form series CSV")
    ex.add_argument("--dly-dir", required=True, dest="dly_dir")
    ex.add_argument("--elements", default="PRCP,TMAX")
    ex.add_argument("--from", required=True, dest="date_from")
    ex.add_argument("--to", required=True, dest="date_to")
    ex.add_argument("--out", required=True)
    ex.set_defaults(func=_cmd_ghcn_extract)

    tr = ghcn_sub.add_parser("triplets", help="build and gate response/covariate-pair triplets")
    tr.add_argument("--config", required=True)
    tr.add_argument("--out", required=True, help="output directory")
    tr.set_defaults(func=_cmd_ghcn_triplets)

    gb = ghcn_sub.add_parser("benchmark", help="rank methods on triplet CSVs")
    gb.add_argument("--triplets", required=True, help="directory of triplet_*.csv files")
    gb.add_argument("--alphas", default="0.90:0.99:0.01")
    gb.add_argument("--seed", type=int, default=0)
    gb.add_argument("--out", required=True, help="output ranks CSV path")
    gb.set_defaults(func=_cmd_ghcn_benchmark)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        _diag("usage", exc)
        return 1
    except (DataError, ConfigError, OSError, ValueError) as exc:
        _diag("data", exc)
        return 2
    except (DegenerateDirectionError, InsufficientTailError, ArithmeticError) as exc:
        _diag("degeneracy", exc)
        return 3


if __name__ == "__main__":
    sys.exit(main())
