import numpy as np
import pytest

import brute
from deltabolt.collision import QuadratureSpec
from deltabolt.grid import Distribution, GridSpec
from deltabolt.kernel import KernelParams
from deltabolt.landau import GrazingGapRecord, fit_gap_slope, grazing_gap, projector, weak_form_ql, weak_form_ql_parts
from deltabolt.testfunctions import bump, constant_one, coordinate, gaussian, quadratic, speed_squared, tent


def test_projector_properties():
    rng = np.random.default_rng(5)
    u = rng.normal(size=(40, 3))
    p = projector(u)
    assert p.shape == (40, 3, 3)
    assert np.abs(np.einsum("kab,kb->ka", p, u)).max() < 1e-13 * np.abs(u).max()
    assert np.abs(np.einsum("kab,kbc->kac", p, p) - p).max() < 1e-14
    assert np.allclose(np.trace(p, axis1=1, axis2=2), 2.0, atol=1e-14)
    with pytest.raises(ValueError):
        projector((0.0, 0.0, 0.0))


def test_two_node_quadratic_identity(two_node_pair):
    # for two nodes of weight 1/h^3 the pair sum collapses to
    # 2 x^gamma (2 x^2 tr C - 6 u^T C u) with u the node separation
    f, va, vb = two_node_pair
    C = np.array([[0.7, 0.1, -0.2], [0.1, -0.4, 0.3], [-0.2, 0.3, 0.2]])
    phi = quadratic(0.3, (-0.2, 0.5, -0.1), C)
    u = np.asarray(va) - np.asarray(vb)
    x = float(np.linalg.norm(u))
    for gamma in (-1.0, -2.5):
        expect = 2.0 * x**gamma * (2.0 * x * x * np.trace(C) - 6.0 * float(u @ C @ u))
        assert weak_form_ql(f, phi, gamma) == pytest.approx(expect, rel=1e-13)


def test_shell_split(two_node_pair):
    f, va, vb = two_node_pair
    phi = quadratic(0.0, (1.0, 0.0, 0.0), np.diag((1.0, 0.5, -0.3)))
    x = float(np.linalg.norm(np.asarray(va) - np.asarray(vb)))
    total, near, maxterm, nterms = weak_form_ql_parts(f, phi, -1.0)
    assert near == 0.0
    assert maxterm > 0 and nterms > 0
    total2, near2, _, _ = weak_form_ql_parts(f, phi, -1.0, shell=x + 0.01)
    assert total2 == pytest.approx(total, rel=1e-15)
    assert near2 == pytest.approx(total2, rel=1e-15)


def test_collision_invariants_vanish():
    rng = np.random.default_rng(21)
    g = GridSpec(n=10, v_max=3.0)
    f = Distribution(g, rng.uniform(0.0, 1.0, size=(10, 10, 10)))
    for phi in (constant_one(), coordinate(0), coordinate(1), coordinate(2), speed_squared()):
        total, _, maxterm, nterms = weak_form_ql_parts(f, phi, -1.5)
        assert abs(total) <= 1e-12 * max(maxterm * nterms, 1.0)


def test_matches_brute():
    g = GridSpec(n=8, v_max=2.0)
    rng = np.random.default_rng(17)
    vals = np.zeros((8, 8, 8))
    idx = rng.integers(0, 8, size=(20, 3))
    for i, j, k in idx:
        vals[i, j, k] += rng.uniform(0.2, 1.0)
    f = Distribution(g, vals)
    shell = 2.5 * g.h
    for phi in (
        quadratic(0.1, (0.3, -0.2, 0.5), np.diag((0.4, -0.1, 0.2))),
        bump((0.2, -0.1, 0.3), 1.6, amplitude=1.1),
        gaussian((0.0, 0.4, -0.2), 0.9),
    ):
        for gamma in (-1.0, -2.0):
            total, near, _, _ = weak_form_ql_parts(f, phi, gamma, shell=shell)
            bt, bn = brute.brute_landau(
                f.values,
                lambda v: phi.gradient(np.asarray(v)),
                lambda v: phi.hessian(np.asarray(v)),
                g.h,
                -g.v_max,
                gamma,
                shell,
            )
            assert total == pytest.approx(bt, rel=1e-12, abs=1e-13)
            assert near == pytest.approx(bn, rel=1e-12, abs=1e-13)


def test_gamma_and_derivative_validation(two_node_pair):
    f, _, _ = two_node_pair
    phi = speed_squared()
    with pytest.raises(ValueError):
        weak_form_ql(f, phi, 0.0)
    with pytest.raises(ValueError):
        weak_form_ql(f, phi, -3.5)
    with pytest.raises(ValueError, match="derivative"):
        weak_form_ql(f, tent((0.0, 0.0, 0.0), 1.0), -1.0)


def test_grazing_gap_records(two_node_pair):
    f, _, _ = two_node_pair
    phi = bump((0.0, 0.0, 0.0), 1.5)
    quad = QuadratureSpec(m_phi=16)
    params = [KernelParams(eps=e, gamma=-1.0) for e in (0.4, 0.2)]
    records = grazing_gap(f, phi, params, quad, f_id="pair")
    assert [r.eps for r in records] == [0.4, 0.2]
    assert len({r.weak_landau for r in records}) == 1
    for r in records:
        assert r.gap == abs(r.weak_boltzmann - r.weak_landau)
        assert r.phi_id == "bump" and r.f_id == "pair" and r.gamma == -1.0
    with pytest.raises(ValueError):
        grazing_gap(f, phi, [], quad)
    mixed = [KernelParams(eps=0.4, gamma=-1.0), KernelParams(eps=0.2, gamma=-2.0)]
    with pytest.raises(ValueError):
        grazing_gap(f, phi, mixed, quad)


def test_fit_gap_slope():
    records = [
        GrazingGapRecord(-1.0, e, 0.0, 0.0, 3.0 * e**1.7, "q", "f")
        for e in (0.4, 0.2, 0.1, 0.05)
    ]
    assert fit_gap_slope(records) == pytest.approx(1.7, rel=1e-12)
    one = records[:1]
    with pytest.raises(ValueError):
        fit_gap_slope(one)
    zeroed = [GrazingGapRecord(-1.0, 0.4, 1.0, 1.0, 0.0, "q", "f")] + one
    with pytest.raises(ValueError):
        fit_gap_slope(zeroed)
