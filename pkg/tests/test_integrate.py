import numpy as np
import pytest
from scipy.integrate import quad

from acalc.algebra import invert, mul, norm
from acalc.errors import DomainError, QuadratureNonConvergence
from acalc.expr import ExprFn, conjugate_fn, parse, poly_fn
from acalc.fixtures import get_algebra
from acalc.integrate import (
    ParametricCurve,
    Polyline,
    antiderivative_probe,
    integrate_curve,
    load_curve,
    loop_integral,
    ml_bound_check,
    reverse_curve,
    riemann_sum,
    segment,
)

from conftest import random_element


def unit_circle(algebra):
    comps = (parse("cos(t)", 1, names={"t": 0}), parse("sin(t)", 1, names={"t": 0}))
    return ParametricCurve(algebra=algebra, components=comps, t0=0.0, t1=2.0 * np.pi)


def random_quadratic_curve(algebra, rng):
    """z(t) = a + b t + c t^2 with random coefficients, over [0, 1]."""
    a, b, c = (rng.uniform(-1, 1, algebra.dim) for _ in range(3))
    comps = []
    for k in range(algebra.dim):
        src = f"({float(a[k])!r}) + ({float(b[k])!r})*t + ({float(c[k])!r})*t^2"
        comps.append(parse(src, 1, names={"t": 0}))
    return ParametricCurve(algebra=algebra, components=tuple(comps), t0=0.0, t1=1.0)


# ---------------------------------------------------------------------------
# basics
# ---------------------------------------------------------------------------

def test_constant_integrates_to_displacement():
    H = get_algebra("H")
    f = poly_fn(H, [H.one()])
    p, q = H.element([0.0, 0.0]), H.element([2.0, -1.0])
    result = integrate_curve(f, segment(p, q))
    assert norm(result.value - (q - p)) <= 1e-10


def test_fundamental_theorem_quadratic_curves():
    # int 3 z^2 dz = Q^3 - P^3 along any curve
    rng = np.random.default_rng(1)
    for name in ("H", "C", "3-hyperbolic"):
        a = get_algebra(name)
        f = poly_fn(a, [0.0, 0.0, 3.0])
        for _ in range(4):
            curve = random_quadratic_curve(a, rng)
            result = integrate_curve(f, curve)
            expected = curve.end ** 3 - curve.start ** 3
            assert norm(result.value - expected) <= 1e-8


def test_fundamental_theorem_polyline():
    C = get_algebra("C")
    f = poly_fn(C, [0.0, 0.0, 3.0])
    verts = tuple(C.element(v) for v in ([0.0, 0.0], [1.0, 0.5], [0.5, 2.0], [-1.0, 1.0]))
    result = integrate_curve(f, Polyline(verts))
    expected = verts[-1] ** 3 - verts[0] ** 3
    assert norm(result.value - expected) <= 1e-9


def test_hyperbolic_component_decomposition():
    # over H the integral splits into int u dx + v dy and int v dx + u dy,
    # cross-checked against scipy quadrature of the real line integrals
    H = get_algebra("H")
    f = poly_fn(H, [H.element([0.5, -1.0]), 0.0, 1.0])  # c + z^2
    curve = random_quadratic_curve(H, np.random.default_rng(7))

    def xy(t):
        return curve.point(t), curve.velocity(t)

    def u(t):
        z, _ = xy(t)
        return f.eval_coords(z)[0]

    def v(t):
        z, _ = xy(t)
        return f.eval_coords(z)[1]

    first = quad(lambda t: u(t) * xy(t)[1][0] + v(t) * xy(t)[1][1], 0.0, 1.0,
                 epsabs=1e-12)[0]
    second = quad(lambda t: v(t) * xy(t)[1][0] + u(t) * xy(t)[1][1], 0.0, 1.0,
                  epsabs=1e-12)[0]
    result = integrate_curve(f, curve)
    assert abs(result.value.coords[0] - first) <= 1e-9
    assert abs(result.value.coords[1] - second) <= 1e-9


def test_linearity(commutative_fixtures):
    from acalc.expr import add, constant_fn, exprfn_mul

    rng = np.random.default_rng(3)
    for a in list(commutative_fixtures.values())[:4]:
        f = poly_fn(a, [0.0, 1.0])
        g = poly_fn(a, [a.one(), 0.0, 1.0])
        alpha = random_element(a, rng)
        curve = random_quadratic_curve(a, rng)
        scaled = exprfn_mul(constant_fn(a, alpha), f)
        combined = ExprFn(a, tuple(
            add(cf, cg) for cf, cg in zip(scaled.components, g.components)
        ))
        lhs = integrate_curve(combined, curve).value
        rhs = mul(alpha, integrate_curve(f, curve).value) + integrate_curve(g, curve).value
        assert norm(lhs - rhs) <= 1e-9


def test_reversal_antisymmetry():
    H = get_algebra("H")
    f = poly_fn(H, [H.element([1.0, 2.0]), 1.0, 1.0])
    rng = np.random.default_rng(5)
    curve = random_quadratic_curve(H, rng)
    forward = integrate_curve(f, curve).value
    backward = integrate_curve(f, reverse_curve(curve)).value
    assert norm(forward + backward) <= 1e-10
    # polyline reversal too
    verts = tuple(H.element(v) for v in ([0.0, 0.0], [1.0, 1.5], [2.0, 0.5]))
    poly = Polyline(verts)
    fw = integrate_curve(f, poly).value
    bw = integrate_curve(f, reverse_curve(poly)).value
    assert norm(fw + bw) <= 1e-10


def test_concatenation_additivity():
    C = get_algebra("C")
    f = poly_fn(C, [0.0, 0.0, 1.0])
    curve = random_quadratic_curve(C, np.random.default_rng(9))
    first = ParametricCurve(algebra=C, components=curve.components, t0=0.0, t1=0.4)
    second = ParametricCurve(algebra=C, components=curve.components, t0=0.4, t1=1.0)
    total = integrate_curve(f, curve).value
    split_sum = integrate_curve(f, first).value + integrate_curve(f, second).value
    assert norm(total - split_sum) <= 1e-10


def test_riemann_sum_converges_to_quadrature():
    # open arc: the one-sided sum converges at first order in 1/m
    H = get_algebra("H")
    f = poly_fn(H, [0.0, 0.0, 1.0])
    comps = (parse("cos(t)", 1, names={"t": 0}), parse("sin(t)", 1, names={"t": 0}))
    arc = ParametricCurve(algebra=H, components=comps, t0=0.0, t1=np.pi / 2)
    target = integrate_curve(f, arc).value
    errs = [norm(riemann_sum(f, arc, m) - target) for m in (64, 256, 1024)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] <= 1e-2
    assert errs[0] / errs[2] > 8.0  # at least first-order decay across 16x refinement


# ---------------------------------------------------------------------------
# ML bound
# ---------------------------------------------------------------------------

def test_ml_bound_unit_segment():
    H = get_algebra("H")
    f = poly_fn(H, [H.one()])
    report = ml_bound_check(f, segment(H.element([0.0, 0.0]), H.element([1.0, 0.0])))
    assert report.holds
    assert abs(report.lhs - 1.0) <= 1e-10
    assert abs(report.L - 1.0) <= 1e-10
    assert abs(report.M - 1.0) <= 1e-12
    assert abs(report.K - 3 * np.sqrt(2)) <= 1e-12


def test_ml_bound_identity_on_circle():
    H = get_algebra("H")
    report = ml_bound_check(poly_fn(H, [0.0, 1.0]), unit_circle(H))
    assert report.holds
    assert abs(report.L - 2 * np.pi) <= 1e-8
    assert abs(report.M - 1.0) <= 1e-6


def test_ml_bound_square_polyline():
    H = get_algebra("H")
    f = poly_fn(H, [0.0, 0.0, 1.0])
    square = Polyline(tuple(H.element(v) for v in (
        [1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0], [1.0, 1.0])))
    assert square.closed
    assert ml_bound_check(f, square).holds


# ---------------------------------------------------------------------------
# loops and path independence
# ---------------------------------------------------------------------------

def test_loop_integrals_vanish_for_differentiable():
    for name in ("H", "C"):
        a = get_algebra(name)
        circle = unit_circle(a)
        for coeffs in ([0.0, 1.0], [0.0, 0.0, 1.0], [a.element([1.0, -0.5])]):
            result = loop_integral(poly_fn(a, coeffs), circle)
            assert result.vanishes
            assert norm(result.value) <= 1e-8


def test_conjugate_loop_does_not_vanish():
    # classical witness: the conjugate around the unit circle gives 2 pi i
    C = get_algebra("C")
    result = loop_integral(conjugate_fn(C, 2), unit_circle(C))
    assert not result.vanishes
    assert norm(result.value) > 0.1
    assert np.allclose(result.value.coords, [0.0, 2.0 * np.pi], atol=1e-8)


def test_loop_requires_closed_curve():
    H = get_algebra("H")
    with pytest.raises(ValueError):
        loop_integral(poly_fn(H, [0.0, 1.0]), segment(H.element([0.0, 0.0]), H.element([1.0, 0.0])))


def test_antiderivative_probe_exact_for_polynomials():
    H = get_algebra("H")
    f = poly_fn(H, [0.0, 2.0])  # antiderivative z^2 exists
    samples = [H.element(v) for v in ([0.0, 0.0], [1.0, 0.2], [-0.5, 1.0], [0.7, -0.7], [2.0, 1.0])]
    report = antiderivative_probe(f, samples, seed=0)
    assert report.max_discrepancy <= 1e-8


def test_antiderivative_probe_constant():
    C = get_algebra("C")
    f = poly_fn(C, [C.element([1.0, 1.0])])
    samples = [C.element(v) for v in ([0.0, 0.0], [1.0, 1.0], [2.0, -1.0])]
    assert antiderivative_probe(f, samples, seed=1).max_discrepancy <= 1e-10


def test_antiderivative_probe_detects_path_dependence():
    C = get_algebra("C")
    f = conjugate_fn(C, 2)
    samples = [C.element(v) for v in ([0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [-1.0, 0.5])]
    report = antiderivative_probe(f, samples, seed=0)
    assert report.max_discrepancy > 0.1


def test_ftc_derivative_of_accumulated_integral():
    # F(z) = int_{z0}^{z} f, built numerically, has derivative f(z)
    H = get_algebra("H")
    f = poly_fn(H, [H.element([0.3, 0.1]), 0.0, 3.0])
    z0 = H.element([0.1, 0.0])

    def F(coords):
        return integrate_curve(f, segment(z0, H.element(coords))).value.coords

    # wrap the numeric primitive as a black-box for a small FD Jacobian
    z = H.element([0.9, 0.4])
    h = 1e-5
    J = np.empty((2, 2))
    for i in range(2):
        step = np.zeros(2)
        step[i] = h
        J[:, i] = (F(z.coords + step) - F(z.coords - step)) / (2 * h)
    # J should be the representation matrix of f(z): columns f(z)*v_i
    from acalc.algebra import regrep

    assert np.max(np.abs(J - regrep(f(z)))) <= 1e-4


def test_log_integrand_in_units_region():
    # g(z) = int_1^z d eta / eta over the unit wedge of H satisfies g' = 1/z
    H = get_algebra("H")
    inv_fn = ExprFn(H, (parse("x1/(x1^2 - x2^2)", 2), parse("-x2/(x1^2 - x2^2)", 2)))
    one = H.one()

    def g(coords):
        return integrate_curve(inv_fn, segment(one, H.element(coords))).value.coords

    z = H.element([2.0, 0.5])  # inside the x > |y| wedge, segment stays in units
    h = 1e-5
    J = np.empty((2, 2))
    for i in range(2):
        step = np.zeros(2)
        step[i] = h
        J[:, i] = (g(z.coords + step) - g(z.coords - step)) / (2 * h)
    from acalc.algebra import regrep

    assert np.max(np.abs(J - regrep(inv_fn(z)))) <= 1e-4
    assert np.max(np.abs(J - regrep(invert(z)))) <= 1e-4


def test_domain_error_on_zero_divisor_crossing():
    # rational integrand along a segment through the light-cone singularity
    H = get_algebra("H")
    inv_fn = ExprFn(H, (parse("x1/(x1^2 - x2^2)", 2), parse("-x2/(x1^2 - x2^2)", 2)))
    bad = segment(H.element([1.0, 1.0]), H.element([1.0, 1.0]) * 3.0)  # on the cone
    with pytest.raises((DomainError, QuadratureNonConvergence)):
        integrate_curve(inv_fn, bad)


# ---------------------------------------------------------------------------
# files
# ---------------------------------------------------------------------------

def test_load_parametric_curve(tmp_path):
    import json

    doc = {
        "algebra": "H",
        "kind": "parametric",
        "components": ["cos(t)", "sin(t)"],
        "t0": 0.0,
        "t1": 2.0 * np.pi,
    }
    path = tmp_path / "circle.json"
    path.write_text(json.dumps(doc))
    curve = load_curve(str(path))
    assert curve.closed
    f = poly_fn(curve.algebra, [0.0, 0.0, 1.0])
    assert norm(integrate_curve(f, curve).value) <= 1e-8


def test_load_polyline_curve(tmp_path):
    import json

    doc = {"algebra": "C", "kind": "polyline", "vertices": [[0, 0], [1, 0], [1, 1]]}
    path = tmp_path / "poly.json"
    path.write_text(json.dumps(doc))
    curve = load_curve(str(path))
    assert not curve.closed
    assert len(curve.vertices) == 3


def test_quadrature_nonconvergence_near_singularity():
    # the path crosses the singular cone at a non-dyadic parameter, so no
    # sample hits the pole exactly and refinement runs out of depth
    H = get_algebra("H")
    inv_fn = ExprFn(H, (parse("x1/(x1^2 - x2^2)", 2), parse("-x2/(x1^2 - x2^2)", 2)))
    crossing = segment(H.element([2.0, 1.0]), H.element([2.0, 3.0 + 1e-7]))
    with pytest.raises(QuadratureNonConvergence) as excinfo:
        integrate_curve(inv_fn, crossing)
    assert excinfo.value.error_bound > 0
