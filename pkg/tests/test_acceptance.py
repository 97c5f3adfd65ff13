"""Acceptance gate: twelve numbered end-to-end criteria, one test each.

Every test prints a `[ACCEPT] criterion NN PASS|FAIL ...` verdict outside the
capture (so the line is visible in any pytest run) and then asserts, so a red
criterion shows up in both the verdict line and the pytest summary. Criteria with
a stated runtime budget measure and enforce it.
"""

import time

import numpy as np
import pytest

import oracles
from metricweights import (
    ap_domain_characteristic,
    ap_tilde_characteristic,
    cli,
    coifman_rochberg_weight,
    io,
    jones_factorize,
    maximal_fn,
    power_weight,
    rdf_apply_T,
    restrict_weight_report,
    wolff_extend,
)
from metricweights.studies import (
    chain_comparability_study,
    chain_growth_study,
    condition_refinement_study,
    extension_refinement_study,
    interval_space,
    qh_interval_study,
    random_grid_domain,
    unit_band_subset,
    whitney_refinement_study,
)
from metricweights.weights import holder_average_bound_margin
from metricweights.whitney import check_cover_invariants, whitney_cover


@pytest.fixture
def verdict(capfd):
    """Print one `[ACCEPT] criterion NN ...` line past the capture, then assert."""

    def _verdict(num: int, ok: bool, desc: str, detail: str) -> None:
        line = f"[ACCEPT] criterion {num:02d} {'PASS' if ok else 'FAIL'} {desc} [{detail}]"
        with capfd.disabled():
            print(line, flush=True)
        assert ok, line

    return _verdict


def _rel(got, want):
    got = np.asarray(got, dtype=float)
    want = np.asarray(want, dtype=float)
    return float(np.max(np.abs(got - want) / np.abs(want)))


def _random_subset(rng, n, density=0.6):
    mask = rng.random(n) < density
    mask[int(rng.integers(0, n))] = True
    return mask, np.flatnonzero(mask)


def test_criterion_01_oracle_equivalence(verdict):
    t0 = time.time()
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 41))
        space = oracles.random_metric_space(rng, n)
        w = oracles.random_weight(rng, n)
        f = np.abs(rng.normal(size=n)) + 0.1
        e_mask, e_ids = _random_subset(rng, n)
        d_mask, d_ids = _random_subset(rng, n)

        worst = max(worst, _rel(maximal_fn(space, f), oracles.naive_maximal(space, f)))
        worst = max(
            worst,
            _rel(
                maximal_fn(space, f[e_ids], E=e_mask),
                oracles.naive_maximal(space, np.where(e_mask, f, 0.0)),
            ),
        )
        for p in (1.0, 2.0, 3.0):
            got = ap_tilde_characteristic(space, e_mask, w[e_ids], p).value
            worst = max(worst, _rel(got, oracles.naive_tilde_char(space, e_mask, w, p)))
            got = ap_domain_characteristic(space, d_mask, w[d_ids], p).value
            worst = max(worst, _rel(got, oracles.naive_domain_char(space, d_mask, w, p)))
    elapsed = time.time() - t0
    ok = worst <= 1e-12 and elapsed < 60.0
    verdict(
        1,
        ok,
        "maximal functions and characteristics match the naive oracle on 100 random spaces",
        f"worst rel err {worst:.2e}, {elapsed:.1f} s",
    )


def test_criterion_02_maximal_sandwich(verdict):
    rng = np.random.default_rng(2)
    violations = 0
    k_largest = 1.0
    for _ in range(50):
        n = int(rng.integers(3, 41))
        space = oracles.random_metric_space(rng, n)
        f = np.abs(rng.normal(size=n)) + 0.05
        g = rng.uniform(0.5, 2.0, size=n)
        eps = float(rng.uniform(0.05, 0.95))
        w_x, _ = coifman_rochberg_weight(space, f, eps, g)
        e_mask, e_ids = _random_subset(rng, n, density=0.5)
        w_e = w_x[e_ids]
        k = ap_tilde_characteristic(space, e_mask, w_e, 1.0).value
        m = maximal_fn(space, w_e, E=e_mask)[e_ids]
        violations += int(np.sum(w_e > m * (1.0 + 1e-12)))
        violations += int(np.sum(m > k * w_e * (1.0 + 1e-12)))
        k_largest = max(k_largest, k)
    ok = violations == 0
    verdict(
        2,
        ok,
        "w <= m_E w <= K w pointwise for 50 restricted Coifman-Rochberg weights",
        f"violations {violations}, largest K {k_largest:.3f}",
    )


def test_criterion_03_exponent_and_average_bounds(verdict):
    rng = np.random.default_rng(3)
    worst_mono = 0.0
    for k in range(20):
        n = int(rng.integers(3, 31))
        space = oracles.random_metric_space(rng, n)
        e_mask, e_ids = _random_subset(rng, n, density=0.7)
        v = oracles.random_weight(rng, e_ids.size)
        p = 1.0 if k % 4 == 0 else float(rng.uniform(1.0, 3.0))
        q = p + float(rng.uniform(0.0, 2.0))
        cap = 1.0 if p == 1.0 else min(1.0, (q - 1.0) / (p - 1.0))
        char_p = ap_tilde_characteristic(space, e_mask, v, p).value
        for delta in (cap / 2.0, cap):
            lhs = ap_tilde_characteristic(space, e_mask, v**delta, q).value
            worst_mono = max(worst_mono, lhs / char_p**delta - 1.0)

    worst_avg = 0.0
    for _ in range(20):
        n = int(rng.integers(3, 31))
        space = oracles.random_metric_space(rng, n)
        e_mask, e_ids = _random_subset(rng, n, density=0.7)
        v = oracles.random_weight(rng, e_ids.size)
        q = float(rng.uniform(1.0, 3.0))
        g = rng.normal(size=e_ids.size)
        margin = holder_average_bound_margin(space, e_mask, v, q, g)
        char = ap_tilde_characteristic(space, e_mask, v, q).value
        worst_avg = max(worst_avg, margin / char - 1.0)

    ok = worst_mono <= 1e-10 and worst_avg <= 1e-10
    verdict(
        3,
        ok,
        "power-compression and ball-average bounds hold on 20 fixtures each",
        f"worst compression excess {worst_mono:.2e}, worst average excess {worst_avg:.2e}",
    )


def test_criterion_04_factorization_certificates(verdict):
    t0 = time.time()
    rng = np.random.default_rng(4)
    worst_residual = 0.0
    violations = 0
    for k in range(50):
        n = int(rng.integers(20, 201))
        space = oracles.random_metric_space(rng, n)
        e_mask, e_ids = _random_subset(rng, n, density=0.7)
        v = oracles.random_weight(rng, e_ids.size)
        p = (1.5, 2.0, 3.0)[k % 3]
        fact = jones_factorize(space, e_mask, v, p)
        worst_residual = max(worst_residual, fact.residual)
        k1, k2 = fact.bounds()
        m1 = maximal_fn(space, fact.v1, e_mask)[e_ids]
        m2 = maximal_fn(space, fact.v2, e_mask)[e_ids]
        violations += int(np.sum(m1 > k1 * fact.v1 * (1.0 + 1e-12)))
        violations += int(np.sum(m2 > k2 * fact.v2 * (1.0 + 1e-12)))
        t_eta = rdf_apply_T(space, e_mask, fact.base_weight, fact.base_p, fact.eta)
        if fact.branch == "1<p<2":
            two_c = (2.0 * fact.c) ** (fact.p / fact.base_p)
        else:
            two_c = 2.0 * fact.c
        violations += int(np.sum(t_eta > two_c * fact.eta * (1.0 + 1e-12)))
    elapsed = time.time() - t0
    ok = worst_residual <= 1e-9 and violations == 0 and elapsed < 120.0
    verdict(
        4,
        ok,
        "factorization certificates hold on 50 fixtures, p in {1.5, 2, 3}, n <= 200",
        f"worst residual {worst_residual:.2e}, violations {violations}, {elapsed:.1f} s",
    )


def test_criterion_05_extension_agreement_and_restriction(verdict):
    rng = np.random.default_rng(5)
    worst_agree = 0.0
    worst_ratio = 0.0
    n_fixtures = 0
    for p in (1.0, 1.5, 2.0, 3.0):
        for _ in range(5):
            n = int(rng.integers(3, 41))
            space = oracles.random_metric_space(rng, n)
            e_mask, e_ids = _random_subset(rng, n)
            w = oracles.random_weight(rng, e_ids.size)
            rep = wolff_extend(space, e_mask, w, p, eps=0.5)
            worst_agree = max(worst_agree, rep.agreement_error)
            rr = restrict_weight_report(space, e_mask, rep.W, p)
            worst_ratio = max(worst_ratio, rr.max_ratio)
            n_fixtures += 1
    # the structured band scenario, including p = 1
    space = interval_space(32)
    e_ids = unit_band_subset(space)
    w = power_weight(space, 0.5, ids=e_ids)
    for p in (1.0, 2.0):
        rep = wolff_extend(space, e_ids, w, p, eps=0.5)
        worst_agree = max(worst_agree, rep.agreement_error)
        rr = restrict_weight_report(space, e_ids, rep.W, p)
        worst_ratio = max(worst_ratio, rr.max_ratio)
        n_fixtures += 1
    ok = worst_agree <= 1e-9 and worst_ratio <= 1.0
    verdict(
        5,
        ok,
        f"extension agrees on E and restriction never amplifies on {n_fixtures} fixtures",
        f"worst agreement {worst_agree:.2e}, worst restriction ratio {worst_ratio:.12f}",
    )


def test_criterion_06_refinement_stability(verdict):
    t0 = time.time()
    rows = extension_refinement_study([64, 128, 256])
    elapsed = time.time() - t0
    aps = [row["extension_ap"] for row in rows]
    factors = [max(aps[i + 1] / aps[i], aps[i] / aps[i + 1]) for i in range(len(aps) - 1)]
    agree = max(row["agreement_error"] for row in rows)
    ok = all(f <= 4.0 for f in factors) and agree <= 1e-9 and elapsed < 300.0
    verdict(
        6,
        ok,
        "extended-weight characteristic stable under refinement at sides 64/128/256",
        f"constants {[f'{a:.4f}' for a in aps]}, factors {[f'{f:.4f}' for f in factors]}, "
        f"worst agreement {agree:.2e}, {elapsed:.1f} s",
    )


def test_criterion_07_condition_threshold(verdict):
    sides = [64, 128, 256]
    mild = condition_refinement_study(sides, 0.5)
    steep = condition_refinement_study(sides, 0.9)

    # verify both tables against the brute-force characteristic at the
    # coarsest side before trusting their growth rates
    space = interval_space(sides[0])
    e_ids = unit_band_subset(space)
    e_mask = np.zeros(space.n, dtype=bool)
    e_mask[e_ids] = True
    oracle_rel = 0.0
    for exponent, rows in ((0.5, mild), (0.9, steep)):
        w = power_weight(space, exponent, ids=e_ids)
        w_full = np.zeros(space.n)
        w_full[e_ids] = w**1.5
        want = oracles.naive_tilde_char(space, e_mask, w_full, 2.0)
        oracle_rel = max(oracle_rel, abs(rows[0]["value"] - want) / want)

    mild_vals = [row["value"] for row in mild]
    steep_vals = [row["value"] for row in steep]
    mild_ratios = [mild_vals[i + 1] / mild_vals[i] for i in range(len(sides) - 1)]
    steep_ratios = [steep_vals[i + 1] / steep_vals[i] for i in range(len(sides) - 1)]
    mild_ok = all(max(r, 1.0 / r) <= 2.0 for r in mild_ratios)
    steep_ok = all(r >= 2.0 for r in steep_ratios)
    ok = mild_ok and steep_ok and oracle_rel <= 1e-12
    verdict(
        7,
        ok,
        "condition table stable at exponent 0.5 and doubling at exponent 0.9",
        f"mild ratios {[f'{r:.4f}' for r in mild_ratios]} (need <= 2), "
        f"steep ratios {[f'{r:.4f}' for r in steep_ratios]} (need >= 2), "
        f"oracle rel {oracle_rel:.1e}",
    )


def test_criterion_08_whitney_invariants(verdict):
    checks = (
        "quarter_disjoint",
        "covers_domain",
        "doubles_inside",
        "sandwich_ok",
        "radius_ratio_ok",
    )
    failed = []
    for seed in range(20):
        space, domain = random_grid_domain(seed)
        inv = check_cover_invariants(whitney_cover(space, domain))
        failed += [f"seed {seed}: {k}" for k in checks if not inv[k]]
    rows = whitney_refinement_study([32, 64])
    overlap_ratio = rows[1]["overlap_n"] / rows[0]["overlap_n"]
    ok = not failed and overlap_ratio <= 2.0
    verdict(
        8,
        ok,
        "cover invariants exact on 20 random domains, overlap bounded across doubling",
        f"failed {failed or 'none'}, overlap {rows[0]['overlap_n']} -> {rows[1]['overlap_n']} "
        f"(ratio {overlap_ratio:.3f})",
    )


def test_criterion_09_qh_oracle(verdict):
    t0 = time.time()
    coarse = qh_interval_study(1e-3)
    fine = qh_interval_study(1e-4)
    elapsed = time.time() - t0
    ok = coarse["rel_error"] <= 0.05 and fine["rel_error"] <= 0.01 and elapsed < 30.0
    verdict(
        9,
        ok,
        "quasihyperbolic distance on (0,1) matches log 2",
        f"rel err {coarse['rel_error']:.2e} at spacing 1e-3, "
        f"{fine['rel_error']:.2e} at 1e-4, {elapsed:.1f} s",
    )


def test_criterion_10_chain_comparability(verdict):
    reports = [chain_comparability_study(side) for side in (32, 64, 128)]
    pairs = [r["n_pairs"] for r in reports]
    corrs = [r["corr"] for r in reports]
    alphas = [r["alpha"] for r in reports]
    growth = [alphas[i + 1] / alphas[i] - 1.0 for i in range(len(alphas) - 1)]
    ok = (
        all(n >= 50 for n in pairs)
        and all(c >= 0.9 for c in corrs)
        and all(g <= 0.25 for g in growth)
    )
    verdict(
        10,
        ok,
        "chain length tracks qh distance at sides 32/64/128",
        f"pairs {pairs}, corr {[f'{c:.4f}' for c in corrs]}, "
        f"alpha {[f'{a:.4f}' for a in alphas]}, growth {[f'{g:+.1%}' for g in growth]}",
    )


def test_criterion_11_chain_weight_band(verdict):
    reports = [chain_growth_study(side) for side in (32, 64, 128)]
    violations = sum(r["violations"] for r in reports)
    holdouts = [r["n_holdout"] for r in reports]
    bands = [r["hold2_band"] for r in reports]
    growth = [bands[i + 1] / bands[i] - 1.0 for i in range(len(bands) - 1)]
    ok = (
        violations == 0
        and all(n > 0 for n in holdouts)
        and all(g <= 0.25 for g in growth)
    )
    verdict(
        11,
        ok,
        "chain bound on averages has zero holdout violations, integral band stable",
        f"violations {violations} over {holdouts} holdouts, "
        f"band {[f'{b:.1f}' for b in bands]}, growth {[f'{g:+.1%}' for g in growth]}",
    )


def _collect_reports(out_dir):
    files = {}
    for path in sorted(out_dir.rglob("*")):
        if path.is_file() and not path.name.endswith(".meta.json"):
            files[str(path.relative_to(out_dir))] = path.read_bytes()
    return files


def test_criterion_12_cli_worker_determinism(tmp_path, capfd, s3, line11, verdict):
    grid = interval_space(20)
    paths = {}
    for name, space in (("grid", grid), ("s3", s3), ("line11", line11)):
        paths[name] = str(tmp_path / f"{name}.json")
        io.save_space(paths[name], space)

    w_grid = tmp_path / "w_grid.json"
    io.save_function(w_grid, np.abs(np.linspace(-1.0, 1.0, grid.n)) + 0.25)
    band_ids = unit_band_subset(grid)
    w_band = tmp_path / "w_band.json"
    io.save_function(w_band, power_weight(grid, 0.5, ids=band_ids), e_ids=band_ids)
    band = tmp_path / "band.json"
    io.save_subset(band, band_ids)
    ones3 = tmp_path / "ones3.json"
    io.save_function(ones3, np.ones(s3.n))
    f_line = tmp_path / "f_line.json"
    io.save_function(f_line, np.linspace(1.0, 2.0, line11.n))
    interior = tmp_path / "interior.json"
    io.save_subset(interior, np.arange(1, line11.n - 1))

    fixtures = [
        ("doubling", ["ball", "doubling", "--space", paths["grid"]]),
        (
            "characteristic",
            ["characteristic", "--space", paths["grid"], "--weight", str(w_grid),
             "--p", "2", "--eps-grid", "0,0.5,1"],
        ),
        (
            "characteristic-subset",
            ["characteristic", "--space", paths["grid"], "--weight", str(w_band),
             "--subset", str(band), "--p", "2"],
        ),
        (
            "maximal",
            ["maximal", "--space", paths["line11"], "--function", str(f_line),
             "--subset", str(interior)],
        ),
        ("factorize", ["factorize", "--space", paths["s3"], "--weight", str(ones3), "--p", "2"]),
        ("extend", ["extend", "--space", paths["s3"], "--weight", str(ones3),
                    "--p", "2", "--eps", "1"]),
        (
            "condition",
            ["condition", "--space", paths["grid"], "--weight", str(w_band),
             "--subset", str(band), "--p", "2", "--eps-grid", "0,0.5,1", "--budget", "10"],
        ),
        (
            "restrict",
            ["restrict", "--space", paths["grid"], "--weight", str(w_grid),
             "--subset", str(band), "--p", "2"],
        ),
        ("whitney", ["whitney", "--space", paths["line11"], "--domain", str(interior)]),
        ("chains", ["chains", "--space", paths["line11"], "--domain", str(interior)]),
        ("qh", ["qh", "--space", paths["line11"], "--domain", str(interior),
                "--x", "2", "--y", "7"]),
        ("study", ["study", "refine", "--scenario", "condition", "--sides", "8,16"]),
    ]

    mismatched = []
    for name, argv in fixtures:
        baseline = None
        for workers in (1, 2, 8):
            out_dir = tmp_path / f"{name}-w{workers}"
            rc = cli.main(argv + ["--out", str(out_dir), "--workers", str(workers)])
            capfd.readouterr()
            assert rc == 0, f"{name} exited {rc} with {workers} workers"
            got = _collect_reports(out_dir)
            assert got, f"{name} wrote no reports"
            if baseline is None:
                baseline = got
            elif got != baseline:
                mismatched.append(f"{name}@{workers}")
    ok = not mismatched
    verdict(
        12,
        ok,
        f"{len(fixtures)} CLI fixtures byte-identical under 1/2/8 workers",
        f"mismatches {mismatched or 'none'}",
    )
