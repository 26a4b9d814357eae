"""Acceptance suite: one test per top-level guarantee of the library.

Every test funnels through :func:`criterion`, which prints a single
``[PASS]``/``[FAIL]`` line carrying the measured quantity and its bound
before asserting, so a verbose run reads as a checklist. Guarantees with a
stated runtime budget measure wall-clock time and include it in the check.
"""

import json
import time

import numpy as np
import pytest
from scipy import stats as sps

from extremepls.cli import main
from extremepls.estimator import epls_direction, population_w, projection_covariance
from extremepls.generators import BurrParams, burr_sample, classic_burr_sample
from extremepls.ghcn import mask_pattern_table, mask_stationarity_chisq, parse_dly, parse_stations
from extremepls.masking import MaskConfig, gen_bar_mask, lambda_fn
from extremepls.montecarlo import (
    IGARCH_LIKE,
    STANDARD_GARCH,
    catalog_panels,
    rank_methods,
    run_panel,
)
from extremepls.tailstats import detect_plateau, garch_tail_index, hill_curve


def criterion(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


# ---------------------------------------------------------------------------
# 1. mask marginal consistency
# ---------------------------------------------------------------------------

def test_mask_marginal_consistency():
    # 10^5 independent draws of the length-200 mask in one call: with a
    # scalar clamp the coordinates are i.i.d. chains, so a 200 x 100000
    # mask matrix is 100000 independent replicates of one coordinate.
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    y = burr_sample(BurrParams(0.4), rng.random(200))
    config = MaskConfig(tau=-0.5, alpha_bar=0.5)
    mask = gen_bar_mask(y, config, np.random.default_rng(7), p=100_000)
    deviation = float(np.abs(mask.lam.mean(axis=1) - lambda_fn(y, config.tau)).max())
    elapsed = time.perf_counter() - t0
    criterion(
        "mask marginal consistency",
        deviation <= 0.01 and elapsed < 30.0,
        f"max_i |mean(mask_i) - p_i| = {deviation:.5f} <= 0.01 "
        f"over 100000 draws, tau=-0.5 alpha=0.5 ({elapsed:.1f} s < 30 s)",
    )


# ---------------------------------------------------------------------------
# 2. the closed-form direction maximizes the tail covariance
# ---------------------------------------------------------------------------

def test_population_direction_tail_covariance_optimality():
    t0 = time.perf_counter()
    rng = np.random.default_rng(99)
    n = 2000
    y = (1.0 - rng.random(n)) ** -0.4
    beta = np.array([2.0, -1.0, 0.5])
    beta /= np.linalg.norm(beta)
    x = (y**0.5)[:, None] * beta[None, :]
    threshold = float(np.quantile(y, 0.95))
    tail = y >= threshold
    x_tail, y_tail = x[tail], y[tail]
    w = population_w(
        (x_tail * y_tail[:, None]).mean(axis=0),
        x_tail.mean(axis=0),
        float(y_tail.mean()),
    )

    def tail_cov(directions: np.ndarray) -> np.ndarray:
        proj = x_tail @ directions.T
        return (proj * y_tail[:, None]).mean(axis=0) - proj.mean(axis=0) * y_tail.mean()

    best = float(tail_cov(w[None, :])[0])
    draws = np.random.default_rng(5).standard_normal((10_000, 3))
    draws /= np.linalg.norm(draws, axis=1, keepdims=True)
    excess = float((tail_cov(draws) - best).max()) / abs(best)
    elapsed = time.perf_counter() - t0
    criterion(
        "population direction tail-covariance optimality",
        excess <= 1e-9 and elapsed < 10.0,
        f"max relative excess over 10000 random unit directions = {excess:.2e} <= 1e-9 "
        f"(n=2000, p=3, noiseless; {elapsed:.1f} s < 10 s)",
    )


# ---------------------------------------------------------------------------
# 3. volatility-filter tail index against reference values
# ---------------------------------------------------------------------------

def test_garch_tail_index_reference_values():
    t0 = time.perf_counter()
    cases = [
        (STANDARD_GARCH, 0.1, 0.28),
        (IGARCH_LIKE, 0.1, 0.31),
        (STANDARD_GARCH, 0.4, 0.43),
        (IGARCH_LIKE, 0.4, 0.45),
    ]
    ok = True
    parts = []
    for garch, gamma, target in cases:
        report = garch_tail_index(garch, BurrParams(gamma))
        got = f"{report.gamma_g:.3f}" if report.converged else "no-root"
        ok = ok and report.converged and abs(report.gamma_g - target) <= 0.03
        parts.append(f"(gamma={gamma}, beta={garch.beta}) -> {got} vs {target}+-0.03")
    diverged = garch_tail_index(STANDARD_GARCH, BurrParams(0.5))
    ok = ok and not diverged.converged and "fails" in diverged.reason
    elapsed = time.perf_counter() - t0
    criterion(
        "garch tail index reference values",
        ok and elapsed < 60.0,
        "; ".join(parts) + f"; gamma=0.5 -> divergence report ({elapsed:.1f} s < 60 s)",
    )


# ---------------------------------------------------------------------------
# 4. Hill plateau on an exact Pareto tail
# ---------------------------------------------------------------------------

def test_hill_plateau_recovers_pareto_index():
    t0 = time.perf_counter()
    hits = 0
    means = []
    for seed in range(20):
        y = (1.0 - np.random.default_rng(seed).random(5000)) ** -0.5
        plateau = detect_plateau(hill_curve(y))
        if plateau is not None:
            means.append(plateau.gamma_mean)
            if 0.45 <= plateau.gamma_mean <= 0.55:
                hits += 1
    elapsed = time.perf_counter() - t0
    criterion(
        "hill plateau recovers the tail index",
        hits >= 18 and elapsed < 10.0,
        f"{hits}/20 seeds (need >= 18) give plateau gamma_mean in [0.45, 0.55]; "
        f"observed range {min(means):.3f}-{max(means):.3f} ({elapsed:.1f} s < 10 s)",
    )


# ---------------------------------------------------------------------------
# 5. estimator hand oracle and all-ones-mask equivalence
# ---------------------------------------------------------------------------

def test_estimator_hand_oracle_and_maskless_equivalence():
    y = np.array([1.0, 2.0, 3.0, 4.0])
    x = np.array([[1.0], [1.0], [2.0], [6.0]])
    lam = np.array([[1], [0], [1], [1]])
    d = epls_direction(x, y, lam, threshold=2.5)
    hand_ok = (
        abs(d.diagnostics["v_norm"] - 0.5) <= 1e-12
        and np.allclose(d.beta_hat, [1.0], atol=1e-12)
    )

    rng = np.random.default_rng(13)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(40, 200))
        p = int(rng.integers(1, 8))
        yy = (1.0 - rng.random(n)) ** -float(rng.uniform(0.1, 0.6))
        xx = rng.standard_normal((n, p)) * (1.0 + yy[:, None])
        thr = float(np.quantile(yy, 0.8))
        with_mask = epls_direction(xx, yy, np.ones((n, p)), threshold=thr).beta_hat
        without = epls_direction(xx, yy, threshold=thr).beta_hat
        worst = max(worst, float(np.abs(with_mask - without).max()))
    criterion(
        "estimator hand oracle and maskless equivalence",
        hand_ok and worst <= 1e-12,
        f"hand dataset: |v_norm - 0.5| = {abs(d.diagnostics['v_norm'] - 0.5):.1e} <= 1e-12, "
        f"beta_hat = {d.beta_hat.tolist()}; all-ones mask vs no mask max deviation over "
        f"100 random datasets = {worst:.2e} <= 1e-12",
    )


# ---------------------------------------------------------------------------
# 6 + 8. desk-scale replication panels (shared fixture)
# ---------------------------------------------------------------------------

DESK_PANELS = (
    "indep_gamma0.1_tau-0.1",
    "indep_gamma0.1_tau-0.9",
    "stand_arma_resp_stand_garch_noise_gamma0.1_tau-0.1",
)


@pytest.fixture(scope="module")
def desk_results():
    t0 = time.perf_counter()
    by_label = {spec.label: spec for spec in catalog_panels()}
    results = {}
    for label in DESK_PANELS:
        spec = by_label[label]
        results[label] = run_panel(
            spec.generator_config(n=500, p=101, seed=20260815),
            spec.mask_config(),
            reps=50,
            jobs=4,
        )
    return results, time.perf_counter() - t0


def test_desk_scale_direction_recovery(desk_results):
    results, elapsed = desk_results
    m_easy = results[DESK_PANELS[0]].median_cosine
    m_hard = results[DESK_PANELS[1]].median_cosine
    m_arma = results[DESK_PANELS[2]].median_cosine
    ok = (
        m_easy >= 0.95
        and m_hard >= 0.80
        and m_hard <= m_easy
        and m_arma >= 0.90
        and elapsed < 300.0
    )
    criterion(
        "desk-scale direction recovery",
        ok,
        f"median cosine, n=500 p=101 x 50 reps: independent tau=-0.1 {m_easy:.4f} >= 0.95; "
        f"tau=-0.9 {m_hard:.4f} >= 0.80 and <= {m_easy:.4f}; "
        f"arma-response/garch-noise {m_arma:.4f} >= 0.90 ({elapsed:.0f} s < 300 s)",
    )


# ---------------------------------------------------------------------------
# 7. ranking harness ordering across tail levels
# ---------------------------------------------------------------------------

def test_ranking_harness_order():
    t0 = time.perf_counter()

    def make_dataset(idx: int, n: int = 1000, gamma: float = 0.4, kappa: float = 0.5):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=(777, idx)))
        y = classic_burr_sample(BurrParams(gamma), 1.0 - rng.random(n))
        theta = 0.15 + 0.7 * (np.pi / 2 - 0.3) * (idx / 19) + 0.15
        beta = np.array([np.cos(theta), np.sin(theta)])
        g = y**kappa
        x = g[:, None] * beta + (g[:, None] / 10.0) * rng.standard_normal((n, 2))
        return (f"synthetic{idx:02d}", x, y, None)

    datasets = [make_dataset(idx) for idx in range(20)]
    alphas = [round(0.90 + 0.01 * j, 2) for j in range(10)]
    table = rank_methods(datasets, alphas, seed=0)
    means = table.mean_ranks()
    ok = not table.skipped
    epls_ranks, random_ranks = [], []
    for alpha in alphas:
        per = means[float(alpha)]
        epls_ranks.append(per["epls"])
        random_ranks.append(per["random"])
        ok = ok and per["epls"] < min(v for m, v in per.items() if m != "epls")
        ok = ok and per["random"] > max(v for m, v in per.items() if m != "random")
    elapsed = time.perf_counter() - t0
    criterion(
        "ranking harness order",
        ok and elapsed < 120.0,
        f"over 20 single-index datasets and 10 tail levels: epls mean rank "
        f"{min(epls_ranks):.2f}-{max(epls_ranks):.2f} strictly smallest, random projection "
        f"{min(random_ranks):.2f}-{max(random_ranks):.2f} strictly largest, "
        f"{len(table.skipped)} cells skipped ({elapsed:.0f} s < 120 s)",
    )


# ---------------------------------------------------------------------------
# 8. threshold selection: piecewise-constant objective, selected k in range
# ---------------------------------------------------------------------------

def test_threshold_selection_piecewise_and_range(desk_results):
    rng = np.random.default_rng(321)
    n = 400
    y = (1.0 - rng.random(n)) ** -0.4
    x = (y**0.5)[:, None] * np.array([1.0, -0.5]) + rng.standard_normal((n, 2))
    order_stats = np.sort(y)
    lo, hi = order_stats[-40], order_stats[-39]
    probes = lo + (hi - lo) * (0.01 + 0.98 * np.random.default_rng(8).random(100))
    values = {projection_covariance(x, y, threshold=float(t)) for t in probes}
    previous_gap = projection_covariance(
        x, y, threshold=float(0.5 * (order_stats[-41] + lo))
    )
    piecewise_ok = len(values) == 1 and previous_gap not in values

    results, _ = desk_results
    k_hats = sorted({k for res in results.values() for k in res.k_hat_distribution})
    range_ok = bool(k_hats) and k_hats[0] >= 5 and k_hats[-1] <= 100
    criterion(
        "threshold selection piecewise constancy and k range",
        piecewise_ok and range_ok,
        f"100 probe thresholds between consecutive order statistics give {len(values)} "
        f"distinct objective value(s) and the value changes across the knot; selected k "
        f"spans [{k_hats[0]}, {k_hats[-1]}] inside [5, 100] on all desk panels",
    )


# ---------------------------------------------------------------------------
# 9. climate-archive parsers: exact fields, sentinels, fuzz
# ---------------------------------------------------------------------------

def test_ghcn_parser_roundtrip_missing_and_fuzz():
    line = (
        f"{'USW00013960':<11s} {32.8472:8.4f} {-96.8517:9.4f} {134.1:6.1f} "
        f"{'TX':<2s} {'DALLAS LOVE FIELD AIRPORT':<30s}"
    )
    (station,), station_issues = parse_stations(line)
    roundtrip_ok = (
        station_issues == []
        and station.id == "USW00013960"
        and station.lat == 32.8472
        and station.lon == -96.8517
        and station.elevation == 134.1
        and station.state == "TX"
        and station.name == "DALLAS LOVE FIELD AIRPORT"
    )

    head = f"{'USW00013960':<11s}{2021:04d}{1:02d}{'PRCP':<4s}"
    groups = ["00125   "] + [f"{-9999:5d}   "] * 30
    (fragment,), dly_issues = parse_dly(head + "".join(groups))
    values_ok = (
        dly_issues == []
        and fragment.values[0] == 12.5
        and bool(np.isnan(fragment.values[1]))
    )

    fuzz_rng = np.random.default_rng(20260815)
    alphabet = np.array(list(" ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789.-+"))
    blob = "\n".join(
        "".join(fuzz_rng.choice(alphabet, size=int(fuzz_rng.integers(0, 320))))
        for _ in range(10_000)
    )
    _, s_issues = parse_stations(blob)
    _, d_issues = parse_dly(blob)

    criterion(
        "climate archive parsers",
        roundtrip_ok and values_ok,
        f"station fields round-trip exactly; value field 00125 -> 12.5; -9999 -> missing; "
        f"10000 random lines fuzzed through both parsers with zero crashes "
        f"({len(s_issues)} + {len(d_issues)} issues collected)",
    )


# ---------------------------------------------------------------------------
# 10. chi-square mask stationarity gate
# ---------------------------------------------------------------------------

def test_chisq_mask_stationarity_gate():
    # regime change: both coordinates observed for 100 steps, then both
    # missing for 100 steps; two windows. Haldane-corrected cells and the
    # statistic 4 * 50^2 / 50.5 on 3 degrees of freedom are hand-checked.
    m_shift = np.array([1] * 100 + [0] * 100)
    table = mask_pattern_table(m_shift, m_shift, 2)
    cells_ok = np.array_equal(
        table, np.array([[0.5, 0.5, 0.5, 100.5], [100.5, 0.5, 0.5, 0.5]])
    )
    p_hand = float(sps.chi2.sf(4.0 * 50.0**2 / 50.5, 3))
    p_moving = mask_stationarity_chisq(m_shift, m_shift, 2)
    nonstat_ok = cells_ok and p_moving == pytest.approx(p_hand, rel=1e-12) and p_moving < 1e-6

    pattern = np.array([0, 1, 1, 1, 1, 1, 1, 1, 1, 1])
    p_stationary = mask_stationarity_chisq(
        np.tile(pattern, 20), np.tile(np.roll(pattern, 5), 20), 4
    )
    stat_ok = p_stationary == 1.0
    criterion(
        "chi-square mask stationarity gate",
        nonstat_ok and stat_ok,
        f"regime-change fixture: hand cells match, p = {p_moving:.2e} < 1e-6; "
        f"periodic stationary fixture: p = {p_stationary} > 0.5",
    )


# ---------------------------------------------------------------------------
# 11. benchmark byte determinism across worker counts
# ---------------------------------------------------------------------------

def test_benchmark_jobs_byte_determinism(tmp_path):
    config_path = tmp_path / "bench.json"
    config_path.write_text(
        json.dumps(
            {
                "schemes": ["indep"],
                "gammas": [0.1],
                "taus": [-0.1],
                "alphas": [0.9, 0.95],
                "curve_ks": [5, 10],
            }
        ),
        encoding="utf-8",
    )
    outs = {}
    for jobs in (1, 4):
        out = tmp_path / f"jobs{jobs}"
        rc = main(
            ["benchmark", "--config", str(config_path), "--out", str(out),
             "--n", "80", "--p", "4", "--reps", "4", "--seed", "1",
             "--jobs", str(jobs)]
        )
        assert rc == 0
        outs[jobs] = out
    names = sorted(p.name for p in outs[1].iterdir() if p.name != "run_manifest.json")
    same_listing = names == sorted(
        p.name for p in outs[4].iterdir() if p.name != "run_manifest.json"
    )
    identical = same_listing and all(
        (outs[1] / name).read_bytes() == (outs[4] / name).read_bytes() for name in names
    )
    criterion(
        "benchmark byte determinism across jobs",
        identical,
        f"{len(names)} output files byte-identical between --jobs 1 and --jobs 4 "
        f"(manifest excluded)",
    )
