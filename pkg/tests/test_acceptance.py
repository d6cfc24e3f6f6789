"""Acceptance criteria. Each test records one PASS/FAIL line, shown in the
terminal summary of the pytest run."""

import cmath
import math
import time

import mpmath
import numpy as np
import pytest
from scipy.integrate import quad

from conftest import ACCEPTANCE_LINES
from fig8rt.chernsimons import cs_class
from fig8rt.invariants import LevelContext, _jones_table_cached, surgery_coefficient, tau_integer, tau_rational
from fig8rt.qdilog import QDilogContext, _log_s_strip_array, s_gamma
from fig8rt.repvar import L_pm, enumerate_su2_moduli
from fig8rt.saddle import (
    PhaseIndex,
    classify_nondegenerate,
    grad_psi,
    psi,
    su2_critical_points,
    verify_cs_equals_psi,
)
from fig8rt.specfun import cl2, li2
from fig8rt.verify import aec_scan, check_contour_jones, check_contour_tau, volume_scan


def record(n, ok, detail):
    ACCEPTANCE_LINES.append(f"CRITERION {n}: {'PASS' if ok else 'FAIL'} {detail}")
    print(ACCEPTANCE_LINES[-1])
    assert ok, detail


def dist_z(v):
    return abs(v - round(v))


def coprime_matrix():
    return [(p, q) for q in (1, 2, 3) for p in range(-6, 7) if math.gcd(p, q) == 1]


def test_criterion_01_jeffrey():
    _jones_table_cached.cache_clear()  # time the full computation, not cached tables
    t0 = time.time()
    worst = 0.0
    for r in range(5, 401):
        want = 0.5 - 1 / (2 * math.sqrt(5)) - 2 / math.sqrt(5) * math.cos(2 * math.pi * r / 5)
        worst = max(worst, abs(tau_rational(LevelContext(r), (0, 1)) - want) / (1e-8 * r))
    dt = time.time() - t0
    record(1, worst < 1 and dt < 60, f"max |tau - closed form| / (1e-8 r) = {worst:.2e}, {dt:.1f} s")


def test_criterion_02_integer_vs_rational():
    worst_rel, worst_abs, zeros = 0.0, 0.0, 0
    for f in (1, -1, 2, -2, 3, -3, 5, -5):
        for r in range(5, 61):
            ctx = LevelContext(r)
            a, b = tau_rational(ctx, (f, 1)), tau_integer(ctx, f)
            # some (f, r) give tau = 0 exactly; there both values must be roundoff zeros
            if abs(b) < 1e-12:
                zeros += 1
                worst_abs = max(worst_abs, abs(a - b))
            else:
                worst_rel = max(worst_rel, abs(a - b) / abs(b))
    record(2, worst_rel < 1e-10 and worst_abs < 1e-13,
           f"max relative defect {worst_rel:.2e}; {zeros} vanishing cases, max abs defect {worst_abs:.1e}")


def test_criterion_03_mirror():
    rng = np.random.default_rng(2024)
    worst, n = 0.0, 0
    while n < 20:
        p, q, r = int(rng.integers(-12, 13)), int(rng.integers(1, 7)), int(rng.integers(5, 80))
        if math.gcd(p, q) != 1:
            continue
        ctx = LevelContext(r)
        a, b = tau_rational(ctx, (p, q)), tau_rational(ctx, (-p, q))
        worst = max(worst, abs(a.conjugate() - b) / max(abs(a), 1.0))
        n += 1
    record(3, worst < 1e-10, f"max relative defect {worst:.2e} over {n} triples")


def test_criterion_04_contours():
    t0 = time.time()
    reps = [check_contour_jones(5), check_contour_jones(7),
            check_contour_tau(5, (1, 1)), check_contour_tau(5, (0, 1))]
    dt = time.time() - t0
    ok = all(r.passed for r in reps) and reps[0].tolerance == 1e-6 and reps[2].tolerance == 1e-4 and dt < 600
    detail = ", ".join(f"{r.name}={r.max_defect:.1e}" for r in reps)
    record(4, ok, f"{detail}, {dt:.0f} s")


def test_criterion_05_quantum_dilog():
    worst_fe, worst_ratio = 0.0, 0.0
    for r in (5, 11, 51):
        ctx = QDilogContext.for_level(r)
        g = ctx.gamma
        rng = np.random.default_rng(100 + r)
        z = rng.uniform(-math.pi + g, math.pi - g, 200) + 1j * rng.uniform(-1.5, 1.5, 200)
        ratio = np.exp(_log_s_strip_array(ctx, z + g) - _log_s_strip_array(ctx, z - g))
        worst_fe = max(worst_fe, float(np.max(np.abs((1 + np.exp(1j * z)) * ratio - 1))))
        edge = s_gamma(ctx, -math.pi + g) / s_gamma(ctx, math.pi - g)
        worst_ratio = max(worst_ratio, abs(edge - r) / r)
    record(5, worst_fe < 1e-9 and worst_ratio < 1e-8,
           f"functional equation {worst_fe:.1e}, edge ratio {worst_ratio:.1e}")


def test_criterion_06_cs_equals_psi():
    worst, slowest = 0.0, 0.0
    cases = coprime_matrix() + [(0, 1)]
    for pq in cases:
        t0 = time.time()
        rep = verify_cs_equals_psi(pq)
        slowest = max(slowest, time.time() - t0)
        assert rep["points"] or pq in ((1, 1), (-1, 1))
        worst = max(worst, rep["max_defect"])
    record(6, worst < 1e-6 and slowest < 30,
           f"max dist to Z {worst:.1e} over {len(cases)} surgeries, slowest {slowest:.1f} s")


def test_criterion_07_m0_ledger():
    classes = enumerate_su2_moduli((0, 1))
    cs = sorted({round(cs_class((0, 1), c), 9) % 1 for c in classes})
    cs_ok = len(cs) == 3 and all(min(dist_z(v - w) for v in cs) < 1e-8 for w in (0.0, 0.2, 0.8))
    dets = [pt.det_h for pt in su2_critical_points((0, 1))]
    det_ok = len(dets) == 2 and all(abs(d - 5) < 1e-9 for d in dets)
    val, _ = quad(lambda t: cmath.phase(L_pm(t, -1)), 1 / 6, 0.25, epsabs=1e-13, limit=200)
    int_ok = abs(val / math.pi - 1 / 30) < 1e-8
    record(7, cs_ok and det_ok and int_ok, f"CS {cs}, det {[round(abs(d), 12) for d in dets]}, "
           f"integral/pi - 1/30 = {val / math.pi - 1 / 30:.1e}")


def test_criterion_08_special_values():
    worst_L = max(max(abs(L_pm(0.25, e) - 1), abs(L_pm(1 / 6, e) + 1), abs(L_pm(1 / 3, e) + 1)) for e in (1, -1))
    t = (3 - math.sqrt(5)) / 2
    phi = (1 + math.sqrt(5)) / 2
    li_def = abs(li2(t) - (math.pi**2 / 15 - math.log(phi) ** 2))
    # tanh-sinh copes with the log singularity at 0
    oracle = float(mpmath.quad(lambda s: -mpmath.log(2 * mpmath.sin(s / 2)), [0, mpmath.pi / 3]))
    cl = cl2(math.pi / 3)
    cl_def = max(abs(cl - 1.0149416064096536), abs(cl - oracle))
    record(8, worst_L < 1e-12 and li_def < 1e-12 and cl_def < 1e-12,
           f"L {worst_L:.1e}, Li2 {li_def:.1e}, Cl2 {cl_def:.1e}")


def test_criterion_09_volume():
    _jones_table_cached.cache_clear()
    t0 = time.time()
    rep = volume_scan((50, 100, 200, 400))
    dt = time.time() - t0
    rhos = [s["rho"] for s in rep.samples]
    ok = rep.passed and all(abs(b - 1) < abs(a - 1) for a, b in zip(rhos, rhos[1:])) and abs(rhos[-1] - 1) < 0.2
    record(9, ok and dt < 120, f"rho {[round(x, 5) for x in rhos]}, {dt:.1f} s")


AEC_SLOPES = [(1, 1), (2, 1), (3, 1), (-1, 1), (-2, 1), (-3, 1)]
AEC_RESULTS: dict = {}


@pytest.mark.parametrize("pq", AEC_SLOPES)
def test_criterion_10_aec_seifert(pq):
    rep = aec_scan(pq, (50, 100, 200, 400), m=4)
    rel = [s["rel_residual"] for s in rep.samples]
    AEC_RESULTS[pq] = (rep.passed, rel)
    assert rep.parameters["asserted"]
    if len(AEC_RESULTS) == len(AEC_SLOPES):
        ok = all(v[0] for v in AEC_RESULTS.values())
        bad = [f"{p}/{q}" for (p, q), v in AEC_RESULTS.items() if not v[0]]
        ACCEPTANCE_LINES.append(f"CRITERION 10: {'PASS' if ok else 'FAIL'} "
                                f"strictly decreasing relative residual; failing slopes: {bad or 'none'}")
    assert all(b < a for a, b in zip(rel, rel[1:])), f"{pq}: relative residuals {[f'{x:.4f}' for x in rel]}"


def test_criterion_10_hyperbolic_report_only():
    rep = aec_scan((5, 1), (50, 100), m=4)
    assert rep.parameters["conjectural"] and rep.tolerance == math.inf


def test_criterion_11_nondegeneracy():
    cases = [pq for pq in coprime_matrix() if abs(pq[0] / pq[1]) < math.sqrt(20)] + [(0, 1)]
    cases += [(14, 3), (-14, 3), (5, 1), (-5, 1), (16, 3), (-16, 3), (6, 1), (-6, 1)]
    smallest, n = math.inf, 0
    for pq in cases:
        for pt in su2_critical_points(pq):
            res = classify_nondegenerate(pq, pt)
            smallest = min(smallest, res["abs_det"])
            n += 1
    record(11, smallest > 1e-6, f"min |det H| = {smallest:.3e} over {n} points")


def test_criterion_12_gradient():
    rng = np.random.default_rng(12)
    h = 1e-6
    indices = [PhaseIndex(a, b, n, surgery_coefficient(*sc)) for a, b, n, sc in (
        (0, 0, 0, (1, 1)), (1, 0, 0, (1, 1)), (0, 1, 0, (-2, 1)), (-1, -1, 0, (3, 1)),
        (0, 0, 1, (5, 2)), (2, 1, 1, (-3, 2)), (0, 0, 2, (4, 3)), (1, -2, 0, (0, 1)))]
    worst, n = 0.0, 0
    while n < 200:
        idx = indices[n % 8]
        x = complex(rng.uniform(0.05, 0.95), rng.uniform(-0.3, 0.3))
        y = complex(rng.uniform(0.05, 0.95), rng.uniform(-0.3, 0.3))
        # stay away from the branch cuts of the logarithms in the phase
        if any(abs(cmath.exp(2j * math.pi * s).imag) < 0.05 and cmath.exp(2j * math.pi * s).real > 0
               for s in (x + y, x - y)):
            continue
        gx, gy = grad_psi(idx, x, y)
        fx = (psi(idx, x + h, y) - psi(idx, x - h, y)) / (2 * h)
        fy = (psi(idx, x, y + h) - psi(idx, x, y - h)) / (2 * h)
        worst = max(worst, abs(gx - fx), abs(gy - fy))
        n += 1
    record(12, worst < 1e-6, f"max |grad - central difference| = {worst:.1e} at {n} points")
