"""End-to-end acceptance checks.

Each test prints one PASS line with its measured quantities; pytest -v adds
the per-criterion PASSED/FAILED verdict.  Tolerances are deliberately the
loose, documented ones: these tests guard the contract, the unit suites
guard the details.
"""

from __future__ import annotations

import math
import time
import xml.etree.ElementTree as ET

import numpy as np

from ckdr.kernels import GAUSSIAN, LINEAR, KernelSpec, center_gram, gram
from ckdr.metrics import (
    Subspace,
    adjusted_rand_index,
    chordal_distance,
    cluster_columns,
    numerical_rank,
)
from ckdr.objective import (
    ObjectiveContext,
    krr_equivalent_loss,
    trace_gradient,
    trace_objective,
)
from ckdr.optimizer import FitConfig, fit_ckdr, fitted_kernel
from ckdr.predictor import (
    fit_dual,
    out_of_sample_error,
    predict_class,
    prediction_weights,
)
from ckdr.simdata import (
    SimSpec,
    block_labels,
    generate_responses,
    relative_shift_cdr,
    relative_shift_readout,
    sample_compositions,
    true_subspace,
)
from ckdr.simplex import (
    cdr_from_subspace,
    project_vector_to_simplex,
    validate_cdr_matrix,
)
from ckdr.ternary import PlotSpec, TernaryPoint, render_projection_plot

from test_simplex import projection_oracle


def _report(name: str, detail: str) -> None:
    print(f"PASS {name}: {detail}")


def _random_instance(rng, n=None):
    n = int(rng.integers(5, 31)) if n is None else n
    d = int(rng.integers(3, 11))
    m = int(rng.integers(2, 4))
    X = rng.dirichlet(np.ones(d), size=n)
    y = rng.normal(size=n)
    K_Y = np.outer(y, y)
    H = np.eye(n) - np.ones((n, n)) / n
    eps = float(rng.uniform(0.001, 0.2))
    sigma = float(rng.uniform(0.4, 1.5))
    ctx = ObjectiveContext(X, H @ K_Y @ H, KernelSpec(GAUSSIAN, sigma=sigma), eps)
    P = rng.dirichlet(np.ones(m), size=d).T
    return ctx, K_Y, P


def fit_setting(setting: str, n: int, seed: int, restarts: int, max_iters: int = 300):
    spec = SimSpec(setting, n=n, d=100, seed=seed)
    X = sample_compositions(spec)
    y = generate_responses(X, spec)
    config = FitConfig(
        m=2, sigma="auto", epsilon=1e-3, restarts=restarts,
        max_iters=max_iters, seed=seed,
    )
    K_Y = gram(KernelSpec(LINEAR), y)
    result = fit_ckdr(X, center_gram(K_Y), config)
    return X, y, config, result


def test_c1_trace_objective_matches_ridge_regression_route():
    rng = np.random.default_rng(1001)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        ctx, K_Y, P = _random_instance(rng)
        a = trace_objective(P, ctx)
        b = krr_equivalent_loss(P, ctx, K_Y)
        worst = max(worst, abs(a - b) / max(abs(a), 1.0))
    elapsed = time.perf_counter() - start
    assert worst < 1e-10
    assert elapsed < 10.0
    _report("dual-route objective", f"max rel diff {worst:.3e} over 100 instances in {elapsed:.2f}s")


def test_c2_analytic_gradient_matches_finite_differences():
    rng = np.random.default_rng(1002)
    start = time.perf_counter()
    worst = 0.0
    h = 1e-6
    for _ in range(50):
        n = int(rng.integers(6, 15))
        ctx, _, P = _random_instance(rng, n=n)
        analytic = trace_gradient(P, ctx)
        numeric = np.zeros_like(P)
        for i in range(P.shape[0]):
            for j in range(P.shape[1]):
                up, dn = P.copy(), P.copy()
                up[i, j] += h
                dn[i, j] -= h
                numeric[i, j] = (trace_objective(up, ctx) - trace_objective(dn, ctx)) / (2 * h)
        scale = max(np.abs(numeric).max(), 1e-12)
        worst = max(worst, np.abs(analytic - numeric).max() / scale)
    elapsed = time.perf_counter() - start
    assert worst < 1e-5
    assert elapsed < 30.0
    _report("gradient", f"max rel error {worst:.3e} over 50 instances in {elapsed:.2f}s")


def test_c3_simplex_projection_matches_enumeration_oracle():
    rng = np.random.default_rng(1003)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        size = int(rng.integers(2, 11))
        v = rng.normal(0.0, 3.0, size=size)
        got = project_vector_to_simplex(v)
        want = projection_oracle(v)
        worst = max(worst, float(np.abs(got - want).max()))
    elapsed = time.perf_counter() - start
    assert worst < 1e-12
    assert elapsed < 5.0
    _report("simplex projection", f"max abs dev {worst:.3e} over 1000 vectors in {elapsed:.2f}s")


def test_c4_linear_score_setting_recovers_subspace_rank_and_blocks():
    truth = true_subspace("i", 100)
    labels = block_labels(100)
    rhos, aris, ranks = [], [], []
    for seed in range(10):
        X, y, config, result = fit_setting("i", n=200, seed=seed, restarts=4)
        rhos.append(chordal_distance(Subspace(result.P_hat), truth))
        ranks.append(numerical_rank(result.P_hat))
        found = cluster_columns(result.P_hat, k=3, seed=seed)
        aris.append(adjusted_rand_index(found, labels))
    med_rho = float(np.median(rhos))
    med_ari = float(np.median(aris))
    assert med_rho < 0.20
    assert all(r == 2 for r in ranks)
    assert med_ari > 0.90
    _report(
        "linear-score recovery",
        f"median rho {med_rho:.4f} (<0.20), ranks all 2, median ARI {med_ari:.3f} (>0.90), 10 seeds",
    )


def test_c5_binary_setting_large_sample_recovery():
    truth = true_subspace("iii", 100)
    rhos = []
    for seed in range(5):
        _, _, _, result = fit_setting("iii", n=500, seed=seed, restarts=3)
        rhos.append(chordal_distance(Subspace(result.P_hat), truth))
    med_rho = float(np.median(rhos))
    assert med_rho < 0.30
    _report("binary-label recovery", f"median rho {med_rho:.4f} (<0.30) at n=500, 5 seeds")


def test_c6_relative_shift_construction_is_exact():
    rng = np.random.default_rng(1006)
    worst_rho = 0.0
    worst_identity = 0.0
    for _ in range(20):
        beta = rng.normal(size=20)
        P = relative_shift_cdr(beta)
        validate_cdr_matrix(P, tol=1e-12)
        truth = Subspace(np.vstack([np.ones(20), beta]))
        worst_rho = max(worst_rho, chordal_distance(Subspace(P), truth))
        a, c = relative_shift_readout(beta)
        for _ in range(5):
            x = rng.dirichlet(np.ones(20))
            dev = abs(a @ (P @ x) + c - beta @ x)
            worst_identity = max(worst_identity, dev)
    assert worst_rho < 1e-10
    assert worst_identity <= 1e-12
    _report(
        "relative-shift construction",
        f"max rho {worst_rho:.2e} (<1e-10), max readout dev {worst_identity:.2e} (<=1e-12)",
    )


def test_c7_subspace_to_reduction_round_trip():
    rng = np.random.default_rng(1007)
    d = 10
    worst = 0.0
    for _ in range(50):
        k = int(rng.integers(1, 6))
        basis = np.ones((1, d)) if k == 1 else np.vstack([np.ones(d), rng.normal(size=(k - 1, d))])
        P = cdr_from_subspace(basis)
        validate_cdr_matrix(P, tol=1e-9)
        assert P.shape == (k, d)
        worst = max(worst, chordal_distance(Subspace(P), Subspace(basis)))
    assert worst < 1e-10
    _report("subspace round trip", f"max rho {worst:.2e} (<1e-10) over 50 random subspaces")


def test_c8_binary_setting_held_out_misclassification():
    X_tr, y_tr, config, result = fit_setting("iii", n=200, seed=77, restarts=3)
    kernel = fitted_kernel(config, X_tr)
    model = fit_dual(
        result.P_hat, X_tr, gram(KernelSpec(LINEAR), y_tr), kernel,
        config.epsilon, y=y_tr,
    )
    test_spec = SimSpec("iii", n=200, d=100, seed=1077)
    X_te = sample_compositions(test_spec)
    y_te = generate_responses(X_te, test_spec)
    wrong = sum(predict_class(model, x) != label for x, label in zip(X_te, y_te))
    mcr = wrong / len(y_te)
    assert mcr < 0.30
    _report("held-out classification", f"misclassification rate {mcr:.3f} (<0.30) on 200 fresh samples")


def test_c9_invariant_bundle():
    rng = np.random.default_rng(1009)
    checks = []

    # projection: idempotent, lands on the simplex
    for _ in range(50):
        v = rng.normal(0.0, 2.0, size=6)
        p1 = project_vector_to_simplex(v)
        p2 = project_vector_to_simplex(p1)
        assert np.all(p1 >= 0.0) and abs(p1.sum() - 1.0) <= 1e-9
        assert np.abs(p2 - p1).max() <= 1e-15
    checks.append("projection idempotent+feasible")

    # Gram symmetry, PSD, centered row sums
    X = rng.dirichlet(np.ones(6), size=40)
    for spec in (KernelSpec(GAUSSIAN, sigma=0.8), KernelSpec(LINEAR)):
        K = gram(spec, X)
        assert np.abs(K.values - K.values.T).max() <= 1e-12
        w = np.linalg.eigvalsh(K.values)
        assert w.min() >= -1e-8 * max(w.max(), 1.0)
        G = center_gram(K).values
        assert np.abs(G.sum(axis=1)).max() <= 1e-8
    checks.append("grams symmetric+PSD+centered")

    # dual predictor: weights sum to one, dual rows sum to zero,
    # objective decomposes into mean in-sample error + ridge norm
    y = rng.normal(size=40)
    K_Y = np.outer(y, y)
    P = rng.dirichlet(np.ones(3), size=6).T
    kernel = KernelSpec(GAUSSIAN, sigma=0.8)
    eps = 0.02
    model = fit_dual(P, X, K_Y, kernel, eps, y=y)
    for _ in range(10):
        v = prediction_weights(model, rng.dirichlet(np.ones(6)))
        assert abs(v.sum() - 1.0) <= 1e-10
    assert np.abs(model.dual_weights.sum(axis=1)).max() <= 1e-10
    H = np.eye(40) - np.ones((40, 40)) / 40
    ctx = ObjectiveContext(X, H @ K_Y @ H, kernel, eps)
    obj = trace_objective(P, ctx)
    errors = [out_of_sample_error(model, X[i], K_Y, K_Y[:, i], K_Y[i, i]) for i in range(40)]
    K_Z = gram(kernel, model.train_projections).values
    V = model.dual_weights
    ridge = eps * float(np.sum(K_Z * (V @ K_Y @ V.T)))
    assert abs(np.mean(errors) + ridge - obj) <= 1e-9 * obj
    checks.append("dual weights+identity")

    # objective: monotone in epsilon, invariant under sample permutation
    values = []
    for e in (1e-4, 1e-3, 1e-2, 1e-1):
        values.append(trace_objective(P, ObjectiveContext(X, H @ K_Y @ H, kernel, e)))
    assert all(a <= b + 1e-15 for a, b in zip(values, values[1:]))
    perm = rng.permutation(40)
    ctx_p = ObjectiveContext(X[perm], (H @ K_Y @ H)[np.ix_(perm, perm)], kernel, eps)
    assert abs(trace_objective(P, ctx_p) - obj) <= 1e-12
    checks.append("objective monotone+permutation-invariant")

    # plots: byte-deterministic, well-formed XML
    pts = [
        TernaryPoint(tuple(z), label=("+" if z[0] > z[2] else "-"))
        for z in rng.dirichlet(np.ones(3), size=25)
    ]
    svg1 = render_projection_plot(pts, PlotSpec(boundary_resolution=20))
    svg2 = render_projection_plot(pts, PlotSpec(boundary_resolution=20))
    assert svg1 == svg2
    assert ET.fromstring(svg1).tag.endswith("svg")
    checks.append("svg deterministic+well-formed")

    _report("invariant bundle", "; ".join(checks))
