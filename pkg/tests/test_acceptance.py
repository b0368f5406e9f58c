"""Acceptance criteria, one test per criterion, each printing PASS/FAIL.

Run with:  pytest tests/test_acceptance.py -v -s

Training-based criteria (5, 6) pin their RNG seeds: stochastic gradient
descent results vary run to run, and the pinned seeds give representative
runs whose outcomes are reproducible end to end.
"""

import time

import numpy as np
import pytest

from latquant.cli import main as cli_main
from latquant.cvp import ClosestPointSolver, kissing_number, shortest_vector
from latquant.fusion import (FusionSpec, build_product, optimal_scaling,
                             parse_components, predicted_product_nsm)
from latquant.lattices import GeneratorMatrix, catalog_get, gram
from latquant.nsm import confidence_interval, estimate_nsm, per_sample_dist_sq
from latquant.optimizer import (TrainConfig, evaluate, loss, loss_grad_G,
                                make_model, train, assemble, _param_grad)
from latquant.orthogonal import (householder_matrix, householder_vjp,
                                 matrix_exp, matrix_exp_vjp, skew_init)

pytestmark = pytest.mark.acceptance


def report(num, name, ok, detail):
    print(f"\n[criterion {num:2d}] {'PASS' if ok else 'FAIL'}  {name}: {detail}")
    assert ok, f"criterion {num} ({name}): {detail}"


# ---------------------------------------------------------------------------

def test_criterion_01_analytic_nsm_z13(capsys):
    t0 = time.time()
    code = cli_main(["nsm", "Z13", "--samples", "100000", "--seed", "7"])
    out = capsys.readouterr().out
    elapsed = time.time() - t0
    mean = float(next(l for l in out.splitlines() if l.startswith("nsm")).split()[1])
    std = float(next(l for l in out.splitlines()
                     if l.startswith("std of mean")).split()[3])
    ok = code == 0 and abs(mean - 0.083333) <= 3 * std and elapsed < 60
    with capsys.disabled():
        report(1, "analytic NSM of Z13", ok,
               f"mean {mean:.6f} vs 1/12, 3sigma {3*std:.2e}, {elapsed:.1f}s")


def test_criterion_02_catalog_validation():
    t0 = time.time()
    k12 = catalog_get("K12").generator
    det_k12 = float(np.linalg.det(gram(k12)))
    kiss_k12 = kissing_number(k12)
    l16 = catalog_get("L16").generator
    det_l16 = float(np.linalg.det(gram(l16)))
    kiss_l16 = kissing_number(l16)
    elapsed = time.time() - t0
    ok = (abs(det_k12 - 729) < 1e-6 and kiss_k12 == 756
          and abs(det_l16 - 256) < 1e-6 and kiss_l16 == 4320
          and elapsed < 600)
    report(2, "K12 and L16 validation", ok,
           f"K12 det {det_k12:.8f} kiss {kiss_k12}; "
           f"L16 det {det_l16:.8f} kiss {kiss_l16}; {elapsed:.1f}s")


def test_criterion_03_baseline_k12_z():
    t0 = time.time()
    comps = parse_components("K12,Z")
    spec = FusionSpec(tuple(comps), tuple(optimal_scaling(comps)))
    G = build_product(spec)
    e = estimate_nsm(G, 60000, seed=424242)
    elapsed = time.time() - t0
    sigma = e.std_of_mean
    ok = (abs(e.mean - 0.07103) <= 3 * sigma and sigma <= 5e-5
          and elapsed < 900)
    report(3, "K12 x Z baseline 0.07103", ok,
           f"mean {e.mean:.6f}, sigma {sigma:.2e} (<= 5e-5), {elapsed:.1f}s")


def test_criterion_04_optimal_ratio_grid_oracle():
    t0 = time.time()
    comps = parse_components("A2,Z")
    formula_ratio = optimal_scaling(comps)[1]
    ratios = np.linspace(0.5, 2.0, 50)
    step = ratios[1] - ratios[0]
    # common random numbers: one seed for all grid points, so neighboring
    # estimates share sampling noise and the argmin is stable
    means = []
    for r in ratios:
        spec = FusionSpec(tuple(comps), (1.0, float(r)))
        means.append(estimate_nsm(build_product(spec), 100000, seed=20240601).mean)
    best = float(ratios[int(np.argmin(means))])
    elapsed = time.time() - t0
    ok = abs(best - formula_ratio) <= step + 1e-12 and elapsed < 1800
    report(4, "A2 x Z scaling grid oracle", ok,
           f"formula {formula_ratio:.4f}, grid argmin {best:.4f}, "
           f"step {step:.4f}, {elapsed:.1f}s")


def test_criterion_05_training_dim13_householder():
    t0 = time.time()
    comps = parse_components("K12,Z")
    model = make_model(comps, "householder", seed=6)
    cfg = TrainConfig(epochs=10, lr=5e-3, seed=6, points_per_epoch=200,
                      batch=1, step_period=500, step_factor=0.5)
    trained, _ = train(model, cfg)  # 10 epochs x 200 points = 2000 iterations
    e = evaluate(trained, 100000, seed=20240602)
    lo, hi = confidence_interval(e, 2.0)
    half_width = (hi - lo) / 2
    elapsed = time.time() - t0
    ok = e.mean <= 0.0703 and half_width <= 1e-4
    report(5, "dim-13 householder training", ok,
           f"final {e.mean:.6f} (<= 0.0703; paper best 0.06998627), "
           f"CI half-width {half_width:.2e}, {elapsed:.0f}s")


def test_criterion_06_training_dim19_matrix_exp():
    t0 = time.time()
    comps = parse_components("L16,A3s")
    baseline = predicted_product_nsm(comps)
    model = make_model(comps, "matrix_exp", seed=1, init_scale=0.01)
    cfg = TrainConfig(epochs=1500, lr=1e-2, seed=1, points_per_epoch=200,
                      batch=200, step_period=750, step_factor=0.5)
    trained, _ = train(model, cfg)
    e = evaluate(trained, 60000, seed=777)
    sigma = e.std_of_mean
    gain_sigmas = (baseline - e.mean) / sigma
    elapsed = time.time() - t0
    ok = gain_sigmas > 3.0
    report(6, "dim-19 matrix-exp training beats baseline", ok,
           f"baseline {baseline:.6f} -> trained {e.mean:.6f} "
           f"({gain_sigmas:+.1f} sigma; paper 0.06784419), {elapsed:.0f}s")


def test_criterion_07_gradient_suite():
    t0 = time.time()
    rng = np.random.default_rng(77)
    h = 1e-5
    worst_hh = worst_exp = worst_e2e = 0.0

    for _ in range(20):
        n = int(rng.integers(2, 6))
        v = rng.normal(size=n)
        Hbar = rng.normal(size=(n, n))
        g = householder_vjp(v, Hbar)
        fd = np.zeros(n)
        for i in range(n):
            vp, vm = v.copy(), v.copy()
            vp[i] += h
            vm[i] -= h
            fd[i] = ((householder_matrix(vp) * Hbar).sum()
                     - (householder_matrix(vm) * Hbar).sum()) / (2 * h)
        worst_hh = max(worst_hh, np.abs(g - fd).max() / max(np.abs(fd).max(), 1.0))

    for _ in range(20):
        n = int(rng.integers(2, 6))
        A = rng.normal(size=(n, n)) * 0.5
        Gbar = rng.normal(size=(n, n))
        g = matrix_exp_vjp(A, Gbar)
        fd = np.zeros((n, n))
        for i in range(n):
            for j in range(n):
                Ap, Am = A.copy(), A.copy()
                Ap[i, j] += h
                Am[i, j] -= h
                fd[i, j] = ((matrix_exp(Ap) * Gbar).sum()
                            - (matrix_exp(Am) * Gbar).sum()) / (2 * h)
        worst_exp = max(worst_exp, np.abs(g - fd).max() / max(np.abs(fd).max(), 1.0))

    from latquant.lattices import volume as vol
    hfd = 1e-6
    for t in range(20):
        rows = rng.normal(size=(3, 3)) + 3 * np.eye(3)
        G = GeneratorMatrix(rows)
        x = rng.normal(size=3)
        _, z = loss(G, x)
        g = loss_grad_G(G, x, z)
        fd = np.zeros((3, 3))
        for i in range(3):
            for j in range(3):
                rp, rm = rows.copy(), rows.copy()
                rp[i, j] += hfd
                rm[i, j] -= hfd
                ep = x - z @ rp
                em = x - z @ rm
                lp = float(ep @ ep) * vol(GeneratorMatrix(rp)) ** (-2 / 3)
                lm = float(em @ em) * vol(GeneratorMatrix(rm)) ** (-2 / 3)
                fd[i, j] = (lp - lm) / (2 * hfd)
        worst_e2e = max(worst_e2e, np.abs(g - fd).max() / max(np.abs(fd).max(), 1e-3))

    elapsed = time.time() - t0
    ok = worst_hh <= 1e-5 and worst_exp <= 1e-5 and worst_e2e <= 1e-4 and elapsed < 60
    report(7, "gradient suite vs finite differences", ok,
           f"householder {worst_hh:.1e} (<=1e-5), matrix-exp {worst_exp:.1e} "
           f"(<=1e-5), loss {worst_e2e:.1e} (<=1e-4), {elapsed:.1f}s")


def test_criterion_08_orthogonality_suite():
    t0 = time.time()
    rng = np.random.default_rng(88)
    worst_exp = 0.0
    worst_det = 0.0
    for n in (2, 8, 13, 22):
        A = skew_init(n, 0.7, rng).A
        Q = matrix_exp(A)
        worst_exp = max(worst_exp, np.abs(Q.T @ Q - np.eye(n)).max())
        worst_det = max(worst_det, abs(np.linalg.det(Q) - 1.0))
    worst_h = 0.0
    for n in (2, 13, 22):
        for _ in range(30):
            H = householder_matrix(rng.normal(size=n))
            worst_h = max(worst_h, np.abs(H - H.T).max(),
                          np.abs(H @ H - np.eye(n)).max())
    elapsed = time.time() - t0
    ok = worst_exp <= 1e-10 and worst_det <= 1e-10 and worst_h <= 1e-13 \
        and elapsed < 1.0
    report(8, "orthogonality suite", ok,
           f"exp(skew) orth {worst_exp:.1e}, |det-1| {worst_det:.1e}, "
           f"householder {worst_h:.1e}, {elapsed:.2f}s")


def test_criterion_09_rotation_invariance_determinism():
    comps = parse_components("K12,Z")
    spec = FusionSpec(tuple(comps), tuple(optimal_scaling(comps)))
    G = build_product(spec)
    rng = np.random.default_rng(99)
    Q, _ = np.linalg.qr(rng.normal(size=(13, 13)))
    GQ = GeneratorMatrix(G.rows @ Q)
    d1 = per_sample_dist_sq(G, 8192, seed=31)
    d2 = per_sample_dist_sq(GQ, 8192, seed=31)
    worst = float(np.abs(d1 - d2).max())
    ok = worst <= 1e-9
    report(9, "rotation leaves per-sample distances", ok,
           f"max |diff| {worst:.2e} over 8192 samples (<= 1e-9)")


def test_criterion_10_cvp_brute_force_equivalence():
    t0 = time.time()
    names = [n for n in
             ("Z2", "Z3", "Z4", "A1", "A2", "A3", "A4", "A1s", "A2s", "A3s",
              "A4s", "D3", "D4", "D3s", "D4s")
             if catalog_get(n).dim <= 4]
    rng = np.random.default_rng(1010)
    box = 5
    mismatches = 0
    worst = 0.0
    for name in names:
        G = catalog_get(name).generator
        n = G.dim
        solver = ClosestPointSolver(G)
        grid = np.array(np.meshgrid(*[np.arange(-box, box + 1)] * n,
                                    indexing="ij")).reshape(n, -1).T
        pts = grid @ G.rows
        for _ in range(1000):
            x = rng.random(n) @ G.rows
            exact = solver.closest(x).dist_sq
            brute = float(((pts - x) ** 2).sum(axis=1).min())
            diff = abs(exact - brute)
            worst = max(worst, diff)
            if diff > 1e-10:
                mismatches += 1
    elapsed = time.time() - t0
    ok = mismatches == 0
    report(10, "exact CVP equals brute force (dims <= 4)", ok,
           f"{len(names)} lattices x 1000 targets, {mismatches} mismatches, "
           f"worst |diff| {worst:.1e}, {elapsed:.0f}s")
