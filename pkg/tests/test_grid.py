import numpy as np
import pytest

from hflow.fields import discrete_laplacian_eigenvalue, eigenmode, random_bandlimited
from hflow.grid import (
    GridSpec,
    ScalarField,
    VectorField,
    dot,
    gradient,
    h1_forward_sq,
    h1_seminorm_sq,
    integrate,
    l2_norm_sq,
    laplacian,
    lattice_gradient,
    lattice_integrate,
    lattice_wedge,
    make_grid,
    sample,
    sample_on_lattice,
    wedge,
)
from conftest import poly_xyxy


def test_make_grid_spacing():
    assert make_grid(3).h == 0.25
    assert make_grid(63).h == 1.0 / 64.0
    g = make_grid(63)
    assert g.h * (g.nx + 1) == 1.0


@pytest.mark.parametrize("n", [0, 1, 2, -5])
def test_make_grid_rejects_small(n):
    with pytest.raises(ValueError):
        make_grid(n)


def test_sample_zero_and_values(g63):
    z = sample(lambda X, Y: np.zeros((3,) + X.shape), g63)
    assert not z.values.any()
    u = sample(poly_xyxy, g63)
    # node (32, 32) is (0.5, 0.5); arrays are 0-based
    assert np.allclose(u.values[:, 31, 31], [0.5, 0.5, 0.25])
    m = sample(lambda X, Y: np.stack([np.sin(np.pi * X) * np.sin(np.pi * Y), 0 * X, 0 * X]), g63)
    assert m.values[0, 31, 31] == pytest.approx(1.0)


def test_sample_triple_of_callables(g31):
    u = sample((lambda X, Y: X, lambda X, Y: Y, lambda X, Y: X * Y), g31)
    assert np.array_equal(u.values, sample(poly_xyxy, g31).values)


def test_sample_rejects_nonfinite(g31):
    with pytest.raises(ValueError, match="non-finite"):
        sample(lambda X, Y: np.stack([np.full_like(X, np.inf), Y, X]), g31)


def test_gradient_zero_and_polynomial(g63):
    z = VectorField.zeros(g63)
    zx, zy = gradient(z)
    assert not zx.values.any() and not zy.values.any()
    # central differences are exact for (x, y, xy) away from the clipped boundary
    u = sample(poly_xyxy, g63)
    ux, uy = gradient(u)
    X, Y = np.meshgrid(g63.h * np.arange(1, 64), g63.h * np.arange(1, 64), indexing="ij")
    inner = (slice(2, -2), slice(2, -2))
    assert np.allclose(ux.values[0][inner], 1.0, atol=1e-12)
    assert np.allclose(ux.values[1][inner], 0.0, atol=1e-12)
    assert np.allclose(ux.values[2][inner], Y[inner], atol=1e-12)
    assert np.allclose(uy.values[2][inner], X[inner], atol=1e-12)


def test_gradient_constant_in_x_slice(g31):
    u = sample(lambda X, Y: np.stack([np.sin(np.pi * Y), 0 * X, 0 * X]), g31)
    ux, _ = gradient(u)
    assert np.allclose(ux.values[0][2:-2, :], 0.0, atol=1e-13)


def _gradient_max_error(n):
    g = make_grid(n)
    u = sample(
        lambda X, Y: np.stack(
            [
                np.sin(np.pi * X) * np.sin(np.pi * Y),
                np.sin(2 * np.pi * X) * np.sin(np.pi * Y),
                np.sin(np.pi * X) * np.sin(2 * np.pi * Y),
            ]
        ),
        g,
    )
    ux, uy = gradient(u)
    X, Y = np.meshgrid(g.h * np.arange(1, n + 1), g.h * np.arange(1, n + 1), indexing="ij")
    exact_x = np.stack(
        [
            np.pi * np.cos(np.pi * X) * np.sin(np.pi * Y),
            2 * np.pi * np.cos(2 * np.pi * X) * np.sin(np.pi * Y),
            np.pi * np.cos(np.pi * X) * np.sin(2 * np.pi * Y),
        ]
    )
    exact_y = np.stack(
        [
            np.pi * np.sin(np.pi * X) * np.cos(np.pi * Y),
            np.pi * np.sin(2 * np.pi * X) * np.cos(np.pi * Y),
            2 * np.pi * np.sin(np.pi * X) * np.cos(2 * np.pi * Y),
        ]
    )
    return max(np.abs(ux.values - exact_x).max(), np.abs(uy.values - exact_y).max())


def test_gradient_second_order_convergence():
    e1, e2 = _gradient_max_error(31), _gradient_max_error(63)
    assert 3.2 <= e1 / e2 <= 4.8


def test_laplacian_eigenmode_identity(g63):
    u = eigenmode(g63, kx=2, ky=3, component=1, amplitude=0.7)
    mu = discrete_laplacian_eigenvalue(g63, 2, 3)
    lap = laplacian(u)
    assert np.allclose(lap.values, -mu * u.values, rtol=1e-12, atol=1e-12)


def test_laplacian_continuum_limit_second_order():
    # discrete eigenvalue of the first mode approaches 2 pi^2 at O(h^2)
    e1 = abs(discrete_laplacian_eigenvalue(make_grid(31)) - 2.0 * np.pi**2)
    e2 = abs(discrete_laplacian_eigenvalue(make_grid(63)) - 2.0 * np.pi**2)
    assert 3.2 <= e1 / e2 <= 4.8


def test_laplacian_single_node_stencil_oracle():
    # n = 1 is below the grid precondition; construct the spec directly
    g = GridSpec(nx=1, ny=1, h=0.5)
    u = VectorField(g, np.full((3, 1, 1), 2.0))
    lap = laplacian(u)
    assert np.allclose(lap.values, -4.0 * 2.0 / 0.25)  # -4 v / h^2


def test_wedge_unit_vectors_and_antisymmetry(g31):
    e1 = sample(lambda X, Y: np.stack([np.ones_like(X), 0 * X, 0 * X]), g31)
    e2 = sample(lambda X, Y: np.stack([0 * X, np.ones_like(X), 0 * X]), g31)
    w = wedge(e1, e2)
    assert np.allclose(w.values[2], 1.0) and not w.values[:2].any()
    a = random_bandlimited(g31, seed=5)
    b = random_bandlimited(g31, seed=6)
    assert np.allclose(wedge(a, b).values, -wedge(b, a).values, atol=0)
    assert np.allclose(wedge(a, a).values, 0.0, atol=1e-14)


def test_wedge_grid_mismatch(g31, g63):
    with pytest.raises(ValueError, match="mismatch"):
        wedge(VectorField.zeros(g31), VectorField.zeros(g63))


def test_wedge_of_polynomial_gradients(g63):
    # for u = (x, y, xy): u_x ^ u_y = (-y, -x, 1)
    u = sample(poly_xyxy, g63)
    ux, uy = gradient(u)
    w = wedge(ux, uy)
    X, Y = np.meshgrid(g63.h * np.arange(1, 64), g63.h * np.arange(1, 64), indexing="ij")
    inner = (slice(2, -2), slice(2, -2))
    assert np.allclose(w.values[0][inner], -Y[inner], atol=1e-12)
    assert np.allclose(w.values[1][inner], -X[inner], atol=1e-12)
    assert np.allclose(w.values[2][inner], 1.0, atol=1e-12)


def test_integrate_constant_and_zero(g63):
    ones = ScalarField(g63, np.ones((63, 63)))
    assert integrate(ones) == pytest.approx(1.0, rel=0.05)
    assert integrate(ScalarField(g63, np.zeros((63, 63)))) == 0.0


def _integrate_sine_error(n):
    g = make_grid(n)
    X, Y = np.meshgrid(g.h * np.arange(1, n + 1), g.h * np.arange(1, n + 1), indexing="ij")
    s = ScalarField(g, np.sin(np.pi * X) * np.sin(np.pi * Y))
    return abs(integrate(s) - 4.0 / np.pi**2)


def test_integrate_sine_product_second_order():
    e1, e2 = _integrate_sine_error(63), _integrate_sine_error(127)
    assert e1 / (4.0 / np.pi**2) < 1e-3
    assert 3.2 <= e1 / e2 <= 4.8


def test_norms_zero_field(g31):
    z = VectorField.zeros(g31)
    assert l2_norm_sq(z) == 0.0
    assert h1_seminorm_sq(z) == 0.0


def test_l2_of_eigenmode_exact(g63):
    c = 1.7
    u = eigenmode(g63, amplitude=c)
    assert l2_norm_sq(u) == pytest.approx(c * c / 4.0, rel=1e-13)


def test_h1_of_polynomial_via_lattice_oracle(g63, g127):
    # the boundary-true lattice path converges to 8/3 at second order
    def a_err(g):
        vals = sample_on_lattice(poly_xyxy, g)
        gx, gy = lattice_gradient(vals, g.h)
        a = lattice_integrate((gx * gx).sum(0) + (gy * gy).sum(0), g.h)
        return abs(a - 8.0 / 3.0)

    e63, e127 = a_err(g63), a_err(g127)
    assert e63 / (8.0 / 3.0) < 1e-3
    assert 3.2 <= e63 / e127 <= 4.8


def test_lattice_volume_integral_of_polynomial(g63):
    vals = sample_on_lattice(poly_xyxy, g63)
    gx, gy = lattice_gradient(vals, g63.h)
    b = lattice_integrate((vals * lattice_wedge(gx, gy)).sum(0), g63.h)
    assert b == pytest.approx(-0.25, abs=1e-12)


def test_integration_by_parts_pairing(g31):
    # quadratic-form compatibility: (Lap u, u) = -h1_forward_sq(u), exactly
    for seed in (0, 1, 2):
        u = random_bandlimited(g31, seed=seed)
        lhs = integrate(dot(laplacian(u), u))
        assert lhs == pytest.approx(-h1_forward_sq(u), rel=1e-12)


def test_operator_linearity(g31):
    a = random_bandlimited(g31, seed=10)
    b = random_bandlimited(g31, seed=11)
    combo = VectorField(g31, 2.0 * a.values - 3.0 * b.values)
    lx, _ = gradient(combo)
    ax, _ = gradient(a)
    bx, _ = gradient(b)
    assert np.allclose(lx.values, 2.0 * ax.values - 3.0 * bx.values, atol=1e-13)
    assert np.allclose(
        laplacian(combo).values,
        2.0 * laplacian(a).values - 3.0 * laplacian(b).values,
        atol=1e-9,
    )
    s = ScalarField(g31, a.values[0] + 4.0 * b.values[1])
    assert integrate(s) == pytest.approx(
        integrate(ScalarField(g31, a.values[0])) + 4.0 * integrate(ScalarField(g31, b.values[1])),
        rel=1e-12, abs=1e-15,
    )


def test_norm_convergence_for_vanishing_smooth_field():
    # h1 of a field vanishing on the boundary together with its gradient
    def h1_err(n):
        g = make_grid(n)
        u = sample(
            lambda X, Y: np.stack(
                [np.sin(np.pi * X) ** 2 * np.sin(np.pi * Y) ** 2, 0 * X, 0 * X]
            ),
            g,
        )
        # integral of |grad sin^2(pi x) sin^2(pi y)|^2 = 2 * pi^2 * (1/2) * (3/8)
        return abs(h1_seminorm_sq(u) - 3.0 * np.pi**2 / 8.0)

    e1, e2 = h1_err(63), h1_err(127)
    assert 3.2 <= e1 / e2 <= 4.8
