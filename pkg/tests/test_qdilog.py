import cmath
import math

import numpy as np
import pytest

from fig8rt.invariants import LevelContext, jones_fig8
from fig8rt.qdilog import (
    PoleError,
    QDilogContext,
    StripError,
    dilog_approximation,
    f_nr,
    fbar_nr,
    g_r,
    i_gamma,
    log_s_gamma,
    s_gamma,
    s_gamma_shifted,
    s_gamma_strip,
)
from fig8rt.qdilog import _log_s_strip_array
from fig8rt.specfun import li2


def test_context_validation():
    with pytest.raises(ValueError):
        QDilogContext(gamma=1.5)
    with pytest.raises(ValueError):
        QDilogContext.for_level(3)
    assert QDilogContext.for_level(7).r == 7.0


def test_ratio_at_strip_edges_is_r():
    for r in (5, 7, 11, 51):
        ctx = QDilogContext.for_level(r)
        g = ctx.gamma
        ratio = s_gamma(ctx, -math.pi + g) / s_gamma(ctx, math.pi - g)
        assert abs(ratio - r) < 1e-8 * r


def test_functional_equation_single_point():
    ctx = QDilogContext.for_level(7)
    z = 0.3 + 0.1j
    g = ctx.gamma
    lhs = (1 + cmath.exp(1j * z)) * s_gamma_strip(ctx, z + g)
    assert abs(lhs - s_gamma_strip(ctx, z - g)) < 1e-10


@pytest.mark.parametrize("r", [5, 11, 51])
def test_functional_equation_on_strip(r):
    ctx = QDilogContext.for_level(r)
    g = ctx.gamma
    rng = np.random.default_rng(r)
    z = rng.uniform(-math.pi + 0.05, math.pi - 0.05, 200) + 1j * rng.uniform(-1, 1, 200)
    ratio = np.exp(_log_s_strip_array(ctx, z + g) - _log_s_strip_array(ctx, z - g))
    assert np.max(np.abs((1 + np.exp(1j * z)) * ratio - 1)) < 1e-9


def test_strip_array_matches_adaptive_quadrature():
    ctx = QDilogContext.for_level(9)
    rng = np.random.default_rng(3)
    z = rng.uniform(-3.0, 3.0, 15) + 1j * rng.uniform(-1, 1, 15)
    fast = np.exp(_log_s_strip_array(ctx, z))
    slow = np.array([s_gamma_strip(ctx, v) for v in z])
    assert np.max(np.abs(fast / slow - 1)) < 1e-10


def test_strip_error():
    ctx = QDilogContext.for_level(5)
    with pytest.raises(StripError):
        s_gamma_strip(ctx, 4.0)
    with pytest.raises(StripError):
        i_gamma(ctx, 3.5)


def test_dilog_approximation_identity():
    ctx = QDilogContext.for_level(10)
    for z in (1.0, 0.5 + 0.2j, -2.0 + 0.3j):
        assert abs(s_gamma_strip(ctx, z) - dilog_approximation(ctx, z)) < 1e-10


def test_dilog_approximation_on_many_points():
    ctx = QDilogContext.for_level(13)
    rng = np.random.default_rng(5)
    for _ in range(100):
        z = complex(rng.uniform(-2.8, 2.8), rng.uniform(-0.5, 0.5))
        exact = s_gamma_strip(ctx, z)
        approx = cmath.exp(li2(-cmath.exp(1j * z)) / (2j * ctx.gamma) + i_gamma(ctx, z))
        assert abs(exact - approx) < 1e-9 * max(1.0, abs(exact))


def test_i_gamma_is_linear_in_gamma():
    a = abs(i_gamma(QDilogContext(math.pi / 100), 0.0))
    b = abs(i_gamma(QDilogContext(math.pi / 200), 0.0))
    assert 1.5 < a / b < 2.5
    ctx = QDilogContext.for_level(20)
    assert all(np.isfinite(abs(i_gamma(ctx, z))) for z in (2.0, -2.0))


def test_extension_matches_strip_value():
    ctx = QDilogContext.for_level(8)
    assert abs(s_gamma(ctx, 0.5) - s_gamma_strip(ctx, 0.5)) < 1e-12
    val = s_gamma_shifted(ctx, 0.1 + 2 * ctx.gamma * 3)
    assert val.shifts == 3


def test_telescoping_product():
    r = 6
    ctx = QDilogContext.for_level(r)
    for z in (0.3 + 0.2j, -1.1 - 0.4j):
        prod = np.prod([1 + cmath.exp(1j * (z + (2 * j + 1) * math.pi / r)) for j in range(r)])
        assert abs(s_gamma(ctx, z) - s_gamma(ctx, z + 2 * math.pi) * prod) < 1e-8 * abs(s_gamma(ctx, z))


def test_pole_detection():
    ctx = QDilogContext.for_level(5)
    g = ctx.gamma
    # S(pi + g) = S(pi - g) / (1 + e^{i pi})
    with pytest.raises(PoleError):
        log_s_gamma(ctx, np.array([math.pi + g]))


def test_g_r_sum_gives_top_jones():
    for r in (5, 7):
        ctx = QDilogContext.for_level(r)
        total = r * sum(g_r(ctx, (m + 0.5) / r) for m in range(r))
        exact = jones_fig8(LevelContext(r), r)
        assert abs(total - exact) < 1e-9 * abs(exact)


def test_g_r_finite_inside_unit_interval():
    ctx = QDilogContext.for_level(7)
    x = np.linspace(0.02, 0.98, 20) + 0.01j
    assert np.all(np.isfinite(g_r(ctx, x)))


def test_fbar_for_zero_surgery():
    r = 9
    ctx = QDilogContext.for_level(r)
    x, y = 0.37 + 0.05j, 0.61 - 0.02j
    ratio = s_gamma(ctx, -math.pi + 2 * math.pi * (x - y)) / s_gamma(ctx, -math.pi + 2 * math.pi * (x + y))
    want = cmath.sin(math.pi * x) * cmath.exp(-2j * math.pi * r * x * y) * ratio
    assert abs(fbar_nr(ctx, 0, 1, 0, 0, x, y) - want) < 1e-10 * abs(want)
    want_f = cmath.sin(math.pi * x) * cmath.exp(-2j * math.pi * r * x * y) * ratio
    assert abs(f_nr(ctx, 0, 1, 0, 0, x, y) - want_f) < 1e-10 * abs(want_f)
