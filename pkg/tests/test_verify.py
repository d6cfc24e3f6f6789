import json
import math

import numpy as np
import pytest

from fig8rt.invariants import LevelContext, tau_rational
from fig8rt.verify import (
    SUITES,
    VerificationReport,
    aec_scan,
    check_contour_jones,
    check_contour_tau,
    check_tan_bounds,
    contour_tau,
    rectangle_nodes,
    run_suite,
    volume_scan,
)


def test_rectangle_nodes_integrate_polynomials_and_poles():
    z, w = rectangle_nodes(0.2, 0.8, 0.3, 4, order=24)
    assert abs(np.sum(w)) < 1e-14
    assert abs(np.sum(z**3 * w)) < 1e-14
    assert abs(np.sum(w / (z - 0.5)) - 2j * np.pi) < 1e-10
    assert abs(np.sum(w / (z - 0.9))) < 1e-10


@pytest.mark.parametrize("r", [5, 7])
def test_contour_jones(r):
    rep = check_contour_jones(r)
    assert rep.passed and len(rep.samples) == 2
    assert rep.max_defect < 1e-10


def test_contour_jones_argument_checks():
    with pytest.raises(ValueError):
        check_contour_jones(12)
    with pytest.raises(ValueError):
        check_contour_jones(5, eps_list=[0.06])


@pytest.mark.parametrize("pq", [(1, 1), (0, 1)])
def test_contour_tau(pq):
    rep = check_contour_tau(5, pq)
    assert rep.passed, rep.samples


def test_contour_orientation_reversal_flips_sign():
    sc = (-1, 1)
    fwd = contour_tau(4, sc)
    rev = contour_tau(4, sc, reverse_inner=True)
    assert abs(fwd + rev) < 1e-12 * max(1.0, abs(fwd))
    assert abs(fwd - tau_rational(LevelContext(4), sc)) < 1e-8


def test_tan_bounds():
    rep = check_tan_bounds(20)
    assert rep.passed
    assert all(s["violations"] == 0 for s in rep.samples)
    assert rep.parameters["n_samples"] == 10_000


def test_volume_scan():
    rep = volume_scan()
    assert rep.passed
    rhos = [s["rho"] for s in rep.samples]
    assert all(abs(b - 1) < abs(a - 1) for a, b in zip(rhos, rhos[1:]))
    assert abs(rhos[-1] - 1) < 0.01


def test_aec_decreasing_for_two():
    rep = aec_scan((2, 1))
    assert rep.parameters["asserted"] and not rep.parameters["conjectural"]
    assert rep.passed, [s["rel_residual"] for s in rep.samples]


def test_aec_hyperbolic_is_report_only():
    rep = aec_scan((5, 1), r_list=(50, 100))
    assert rep.parameters["conjectural"]
    assert rep.tolerance == math.inf and rep.passed
    with pytest.raises(ValueError):
        aec_scan((0, 1))


def test_aec_three_residual_is_half_order():
    # for p/q = 3 the leftover is a half-order term of fixed size
    rep = aec_scan((3, 1), r_list=(50, 100, 200, 400, 800))
    scaled = [s["abs_residual"] * math.sqrt(s["r"]) for s in rep.samples]
    assert max(scaled) / min(scaled) < 1.05


def test_report_json_schema():
    rep = check_tan_bounds(5, n_samples=40)
    d = json.loads(rep.to_json())
    assert set(d) == {"name", "params", "tolerance", "max_defect", "passed", "samples"}
    assert d["passed"] is True
    rep2 = VerificationReport("x", {"z": 1 + 2j}, 0.0, math.inf, [{"v": 1j}])
    d2 = json.loads(rep2.to_json())
    assert d2["tolerance"] == "inf" and d2["params"]["z"] == [1.0, 2.0] and d2["samples"][0]["v"] == [0.0, 1.0]


@pytest.mark.parametrize("name", ["specfun", "qdilog", "invariants", "repvar", "chernsimons", "saddle"])
def test_unit_suites_pass(name):
    reps = run_suite(name)
    assert reps and all(r.passed for r in reps), [(r.name, r.max_defect) for r in reps if not r.passed]


def test_unknown_suite():
    assert "aec" in SUITES
    with pytest.raises(KeyError):
        run_suite("nope")
