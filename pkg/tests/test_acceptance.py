"""Acceptance criteria, each checked at its stated tolerance.

Every test records one PASS/FAIL line, printed in the "acceptance criteria"
section of the pytest summary.
"""

import math
import time
import warnings

import numpy as np
import pytest

from ballotruns.aggregate import overall_alpha_prime, overall_alpha_tilde_prime
from ballotruns.flagseq import FlagSequence
from ballotruns.oracle import enumerate_longest_run_tail, enumerate_run_count_cdf
from ballotruns.runstats import (
    BernoulliModel,
    exact_longest_run_alpha,
    exact_run_count_alpha,
    gaussian_run_count_approx,
    iter_run_count_distributions,
    longest_run_distribution,
    power,
    quick_bound_alpha,
    run_count_distribution,
    run_count_moments,
)
from ballotruns.simulate import PRESETS, run_trials, scenario_from_mapping
from ballotruns.stationarity import SparseSegmentWarning, chi2_upper_tail, stationarity_alpha
from ballotruns.tables import TOLERANCE, compute_row, precinct_minima, verify_tables

from conftest import ACCEPTANCE_LINES

SLACK = 1e-9


def record(key, name, ok, detail):
    ACCEPTANCE_LINES[key] = f"{'PASS' if ok else 'FAIL'}  {key:<5} {name}: {detail}"
    return ok


@pytest.fixture(scope="module")
def verification():
    start = time.perf_counter()
    v = verify_tables()
    return v, time.perf_counter() - start


def _worst(checks):
    return max((abs(c.diff) for c in checks), default=0.0)


def test_1_candidate_rows(verification):
    v, elapsed = verification
    checks = [c for c in v.checks if c.name.startswith("candidate ")]
    bad = [c.name for c in checks if not c.ok]
    ok = len(checks) == 297 and not bad and elapsed < 120
    record("1", "per-candidate rows", ok,
           f"{len(checks) - len(bad)}/{len(checks)} within ±{TOLERANCE}, worst |diff| {_worst(checks):.3f}, {elapsed:.1f} s")
    assert ok, bad


def test_2_precinct_summary(verification):
    v, _ = verification
    checks = {c.name: c for c in v.checks if c.name.startswith("summary ")}
    bad = [n for n, c in checks.items() if not c.ok]
    spots = {214: (9.8, 18.4), 215: (0.8, 2.2), 219: (18.7, 20.2)}
    spot_bad = []
    for precinct, (pa, pat) in spots.items():
        a = checks[f"summary {precinct} p_alpha_prime"].computed
        at = checks[f"summary {precinct} p_alpha_tilde_prime"].computed
        if abs(a - pa) > TOLERANCE + SLACK or abs(at - pat) > TOLERANCE + SLACK:
            spot_bad.append(precinct)
    ok = len(checks) == 18 and not bad and not spot_bad
    record("2", "precinct summary", ok,
           f"{len(checks) - len(bad)}/{len(checks)} within ±{TOLERANCE}, spot precincts 214/215/219 "
           + ("match" if not spot_bad else f"off at {spot_bad}"))
    assert ok, (bad, spot_bad)


def test_3_group_rows(verification):
    v, _ = verification
    checks = [c for c in v.checks if c.name.startswith(("consolidated ", "tuned "))]
    bad = [c.name for c in checks if not c.ok]
    by_key = {(r.row.kind, r.row.precinct): r for r in v.results}
    a217 = by_key[("consolidated", 217)].alpha_tilde
    a212 = by_key[("tuned", 212)].alpha_tilde
    spot_ok = (abs(power(a217) - 14.2) <= TOLERANCE + SLACK and abs(a217 - 5.9e-15) <= 0.05e-15
               and abs(power(a212) - 4.2) <= TOLERANCE + SLACK and abs(a212 - 6.2e-5) <= 0.05e-5)
    ok = len(checks) == 54 and not bad and spot_ok
    record("3", "consolidated and tuned rows", ok,
           f"{len(checks) - len(bad)}/{len(checks)} within ±{TOLERANCE}; 217 consolidated {a217:.3g}, "
           f"212 tuned {a212:.3g}")
    assert ok, bad


def test_3b_precinct_215_run_count_minimum(verification):
    # Printed as 7.5e-4. The rows give 5.68e-4 (m = 183 for Sotskova), which is
    # what the printed row power 3.2 and the precinct value 2.2 both require.
    v, _ = verification
    _, at_min = precinct_minima(v.results)[215]
    ok = abs(power(at_min) - power(7.5e-4)) <= TOLERANCE + SLACK
    record("3b", "precinct 215 run-count minimum 7.5e-4", ok,
           f"computed {at_min:.3g} (power {power(at_min):.3f} vs {power(7.5e-4):.3f})")
    assert ok


def test_4_verdicts(verification):
    v, _ = verification
    minima = precinct_minima(v.results)
    flagged = set()
    primes = {}
    for precinct, (a, at) in minima.items():
        ap, atp = overall_alpha_prime(a, 11), overall_alpha_tilde_prime(at, 11)
        primes[precinct] = ap
        if min(ap, atp) < 1e-9:
            flagged.add(precinct)
    rel = abs(primes[219] - 2.2e-19) / 2.2e-19
    ok = flagged == {214, 216, 218, 219, 220} and rel <= 0.05
    record("4", "verdicts", ok, f"flagged {sorted(flagged)}, 219 alpha' = {primes[219]:.4g} ({rel:.1%} off)")
    assert ok


def test_5_oracle_equivalence():
    worst = 0.0
    for n in range(1, 17):
        for r in range(n + 1):
            p = r / n
            model = BernoulliModel(n, p)
            for s in range(n + 1):
                d = abs(exact_longest_run_alpha(model, s).alpha - enumerate_longest_run_tail(n, p, s).value)
                worst = max(worst, d)
            for m in range(1, n + 1):
                d = abs(exact_run_count_alpha(model, m).alpha - enumerate_run_count_cdf(n, p, m).value)
                worst = max(worst, d)
    norm = 0.0
    for n in (1, 2, 17, 100, 333, 700):
        for p in (0.05, 0.3, 0.5, 532 / 577):
            model = BernoulliModel(n, p)
            norm = max(norm, abs(math.fsum(run_count_distribution(model)) - 1.0))
            if n in (1, 100, 700) and p in (0.3, 532 / 577):
                norm = max(norm, abs(math.fsum(longest_run_distribution(model)) - 1.0))
    ok = worst <= 1e-12 and norm <= 1e-12
    record("5", "engines vs enumeration", ok, f"max |diff| {worst:.2e} (n <= 16), max |sum - 1| {norm:.2e} (n <= 700)")
    assert ok


def test_6_bound_and_approximation_envelopes(dataset):
    bound_below, bound_excess, gauss_under = [], 0.0, 0.0
    for row in dataset.rows():
        res = compute_row(row)
        for r, s, alpha in ((row.r0, row.s0, res.alpha0), (row.r1, row.s1, res.alpha1)):
            if s == 0:
                continue
            qb = quick_bound_alpha(BernoulliModel(row.n, r / row.n), s)
            if qb < alpha * (1 - 1e-12):
                bound_below.append(row)
            if alpha < 0.1:
                bound_excess = max(bound_excess, qb / alpha - 1)
        if res.alpha_tilde < 0.1:
            g = gaussian_run_count_approx(BernoulliModel(row.n, row.r1 / row.n), row.m)
            gauss_under = max(gauss_under, 1 - g / res.alpha_tilde)
    ok = not bound_below and bound_excess <= 0.05 and gauss_under <= 0.06
    record("6", "envelopes", ok,
           f"bound below exact {len(bound_below)}x, max bound excess {bound_excess:.2%}, "
           f"max normal underestimate {gauss_under:.2%}")
    assert ok


def test_7_moment_identity():
    worst = 0.0
    for p in np.round(np.arange(0.1, 0.95, 0.1), 10):
        for n, v in iter_run_count_distributions(float(p), 700):
            if n < 2:
                continue
            i = np.arange(v.size)
            mean = math.fsum(i * v)
            var = math.fsum((i - mean) ** 2 * v)
            mu, sigma2 = run_count_moments(BernoulliModel(n, float(p)))
            worst = max(worst, abs(mean - mu) / mu, abs(var - sigma2) / sigma2)
    ok = worst <= 1e-9
    record("7", "run-count moments", ok, f"max relative error {worst:.2e} over n = 2..700, p = 0.1..0.9")
    assert ok


def test_8_stationarity_calibration():
    integrate = pytest.importorskip("scipy.integrate")
    rng = np.random.default_rng(2024)
    with warnings.catch_warnings():
        warnings.simplefilter("error", SparseSegmentWarning)
        alphas = np.sort([stationarity_alpha(FlagSequence(rng.random(480) < 0.3), 12).alpha
                          for _ in range(10_000)])
    k = alphas.size
    grid = np.arange(1, k + 1) / k
    ks = float(max((grid - alphas).max(), (alphas - (grid - 1 / k)).max()))
    dens = lambda t: t ** 4.5 * math.exp(-t / 2) / (2 ** 5.5 * math.gamma(5.5))
    ref, _ = integrate.quad(dens, 19.675, math.inf)
    tail = chi2_upper_tail(19.675, 11)
    ok = ks < 0.05 and abs(tail - 0.050) <= 1e-3 and abs(tail - ref) <= 1e-9
    record("8", "stationarity calibration", ok,
           f"Kolmogorov distance {ks:.4f} over 10^4 sequences; tail(19.675, 11) = {tail:.6f}, quadrature {ref:.6f}")
    assert ok


def _simulate(name):
    sim = scenario_from_mapping(dict(PRESETS[name], trials="1000", seed="20240908"))
    cons_alpha1 = []
    rows, _ = run_trials(sim, on_report=lambda k, rep: cons_alpha1.append(rep.consolidated.alpha1.alpha))
    for row, a in zip(rows, cons_alpha1):
        row["consolidated_alpha1"] = a
    return rows


@pytest.fixture(scope="module")
def honest_rows():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return _simulate("honest")


@pytest.fixture(scope="module")
def batch_rows():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return _simulate("batch50")


def test_9_detection_power(honest_rows, batch_rows):
    power_rate = np.mean([r["consolidated_alpha1"] < 1 / 198 for r in batch_rows])
    summary_rate = np.mean([r["min_prime"] < 1 / 9 for r in batch_rows])
    fp_rate = np.mean([r["min_prime"] < 1 / 9 for r in honest_rows])
    ok = power_rate >= 0.99 and fp_rate <= 0.15
    record("9", "detection power", ok,
           f"50-ballot batch flagged in {power_rate:.1%} (summary {summary_rate:.1%}) of 1000 trials; "
           f"honest false positives {fp_rate:.1%} at 1/9")
    assert ok


def test_9b_honest_reports_without_summary_markers(honest_rows):
    # per-transcript analyze example: no summary marker in at least 95% of honest seeds
    clean = np.mean([r["alpha_prime"] >= 1 / 9 and r["alpha_tilde_prime"] >= 1 / 9 for r in honest_rows])
    ok = clean >= 0.95
    record("9b", "honest transcripts without summary markers >= 95%", ok,
           f"{clean:.1%} of 1000 seeds clean")
    assert ok
