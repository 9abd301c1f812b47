import math

import numpy as np
import pytest

from deltabolt.bounds import (
    SUITE_NAMES,
    RadialProfile,
    VerificationRecord,
    b_eps_1d,
    check_convolution_bound,
    check_lloglsplit,
    check_young,
    p_eps_eval,
    radial_rearrangement,
    run_suite,
)
from deltabolt.collision import QuadratureSpec
from deltabolt.grid import Distribution, GridSpec, lp_norm, llogl_norm, moments
from deltabolt.kernel import KernelParams


def test_verification_record_mechanics():
    rec = VerificationRecord.measure("demo", 3, 1.0, 2.0)
    assert rec.passed and rec.margin == 1.0
    bad = VerificationRecord.measure("demo", 3, 2.5, 2.0)
    assert not bad.passed and bad.margin == -0.5
    # slack: lhs exceeding rhs by less than the relative tolerance still passes
    edge = VerificationRecord.measure("demo", 3, 2.0 * (1.0 + 5e-10), 2.0)
    assert edge.passed and edge.margin < 0.0
    with pytest.raises(ValueError):
        VerificationRecord("demo", 0, 1.0, 2.0, 1.0, False)


def test_b_eps_1d_frozen():
    # eps=0.2, gamma=-1, x=1.5: mu = 1 - 0.2/1.5, a1^2 = x^2 (1+mu)/2 = 2.1,
    # so eta(a) = a^2, psi = 1 gives (4/(pi 0.2)) * 2.1 = 42/pi
    params = KernelParams(eps=0.2, gamma=-1.0)
    val = b_eps_1d(lambda a: a * a, lambda a: 1.0, 1.5, params)
    assert val == pytest.approx(13.369015219719208, rel=1e-15)
    assert val == pytest.approx(42.0 / math.pi, rel=1e-15)
    # outside the grazing window (eps * x^gamma > 1) the pairing vanishes
    assert b_eps_1d(lambda a: a * a, lambda a: 1.0, 0.15, params) == 0.0
    with pytest.raises(ValueError):
        b_eps_1d(lambda a: a, lambda a: a, 0.0, params)


def test_radial_collapse_identity():
    # the sphere average of the pinned-angle pairing of radial fields
    # collapses to the 1d form with the roles of eta and psi exchanged
    params = KernelParams(eps=0.2, gamma=-1.0)
    eta_bar = lambda r: np.asarray(r) ** 2 * np.exp(-np.asarray(r))
    psi_bar = lambda r: 1.0 / (1.0 + np.asarray(r) ** 2)
    eta3 = lambda pts: eta_bar(np.linalg.norm(np.asarray(pts, dtype=float), axis=-1))
    psi3 = lambda pts: psi_bar(np.linalg.norm(np.asarray(pts, dtype=float), axis=-1))
    rng = np.random.default_rng(2)
    for x in (0.5, 1.5, 4.0):
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        pe = p_eps_eval(eta3, psi3, x * direction, params, m_phi=16)
        bb = 2.0 * math.pi * b_eps_1d(psi_bar, eta_bar, x, params)
        assert pe == pytest.approx(bb, rel=1e-12)


def test_radial_rearrangement_radial_data():
    g = GridSpec(n=32, v_max=4.0)
    r = np.sqrt(g.speed_squared())
    f = Distribution(g, np.exp(-(r**2) / 2.0))
    shells = np.linspace(0.4, 2.4, 9)
    for p in (1.0, 2.0, math.inf):
        prof = radial_rearrangement(f, p, shells, sphere_quad=12)
        assert prof.radii == tuple(shells)
        got = np.asarray(prof.values)
        want = np.exp(-(shells**2) / 2.0)
        # trilinear reads off-grid, so agreement is limited by h^2 curvature
        assert np.abs(got - want).max() < 0.02
    with pytest.raises(ValueError):
        radial_rearrangement(f, 0.5, shells)
    with pytest.raises(ValueError):
        radial_rearrangement(f, 2.0, shells, sphere_quad=3)
    with pytest.raises(ValueError):
        radial_rearrangement(f, 2.0, [0.5, 0.5])


def test_radial_profile_validation():
    with pytest.raises(ValueError):
        RadialProfile((), ())
    with pytest.raises(ValueError):
        RadialProfile((0.0, 1.0), (1.0, 1.0))
    with pytest.raises(ValueError):
        RadialProfile((1.0, 2.0), (1.0,))
    with pytest.raises(ValueError):
        RadialProfile((1.0, 2.0), (1.0, -1.0))


def test_check_young_exponents_and_pass():
    g = GridSpec(n=10, v_max=3.0)
    rng = np.random.default_rng(4)
    nodes = g.nodes()
    f = Distribution(g, np.exp(-((nodes - 0.3) ** 2).sum(axis=-1)))
    h = Distribution(g, np.exp(-((nodes + 0.2) ** 2).sum(axis=-1) / 1.5))
    params = KernelParams(eps=0.2, gamma=-1.5)
    quad = QuadratureSpec()
    with pytest.raises(ValueError):
        check_young(f, h, 2.0, 2.0, 2.0, params, quad)
    rec = check_young(f, h, 1.0, 1.0, 1.0, params, quad, trial_seed=9)
    assert rec.passed
    assert rec.inequality_id == "young:p=1,q=1,r=1"
    assert rec.trial_seed == 9
    assert rec.lhs <= rec.rhs


def test_young_sup_endpoint_violation_is_real():
    # pairing two p > 1 norms fails in the continuum: for matched unit
    # Gaussians the sup of the gain exceeds the (2, 2, inf) product bound
    # by sqrt(2). The discrete ratio climbs toward that constant under
    # refinement, so the violation sharpens rather than washes out.
    params = KernelParams(eps=0.1, gamma=-3.0)
    quad = QuadratureSpec()
    ratios = []
    for n in (16, 20):
        g = GridSpec(n, 5.0)
        fm = Distribution(g, np.exp(-g.speed_squared() / 2.0))
        rec = check_young(fm, fm, 2.0, 2.0, math.inf, params, quad)
        assert not rec.passed
        ratios.append(rec.lhs / rec.rhs)
    assert ratios[0] > 1.02
    assert ratios[1] > ratios[0]
    assert all(r < math.sqrt(2.0) for r in ratios)


def test_check_convolution_bound_branches():
    g = GridSpec(n=10, v_max=3.0)
    nodes = g.nodes()
    f = Distribution(g, np.exp(-(nodes**2).sum(axis=-1) / 1.2))
    mass = moments(f).mass
    # alpha = -1, p = 2: the unit-ball kernel constant is exactly 2 pi
    rec = check_convolution_bound(f, -1.0, 2.0, 0.0, trial_seed=5)
    assert rec.passed
    assert rec.rhs == pytest.approx(mass**2 + 2.0 * math.pi * lp_norm(f, 2.0) ** 2, rel=1e-13)
    assert rec.inequality_id == "convolution:alpha=-1,p=2"
    # alpha = 0 keeps the diagonal, so the pair sum is exactly mass^2
    rec0 = check_convolution_bound(f, 0.0, 2.0, 1.0)
    assert rec0.passed
    assert rec0.lhs == pytest.approx(mass**2, rel=1e-13)
    with pytest.raises(ValueError):
        check_convolution_bound(f, 2.0, 2.0, 1.0)
    with pytest.raises(ValueError):
        check_convolution_bound(f, -3.0, 2.0, 0.0)
    with pytest.raises(ValueError):
        check_convolution_bound(f, -1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        check_convolution_bound(f, -1.0, math.inf, 0.0)


def test_check_lloglsplit():
    g = GridSpec(n=10, v_max=3.0)
    vals = np.exp(-g.speed_squared() / 0.9)
    vals /= g.cell_volume * vals.sum()
    f = Distribution(g, vals)
    params = KernelParams(eps=0.3, gamma=-1.0)
    quad = QuadratureSpec()
    ll = llogl_norm(f)
    rec = check_lloglsplit(f, ll, 2.0, 4.0, params, quad)
    assert rec.passed
    reci = check_lloglsplit(f, ll, math.inf, 4.0, params, quad)
    assert reci.passed
    tail = 16.0 / (params.eps * math.log(4.0)) * ll * lp_norm(f, math.inf)
    assert reci.rhs == pytest.approx(16.0 * 4.0 / params.eps + tail, rel=1e-13)
    with pytest.raises(ValueError):
        check_lloglsplit(f, ll, 2.0, 1.0, params, quad)
    with pytest.raises(ValueError):
        check_lloglsplit(Distribution(g, 2.0 * vals), ll, 2.0, 4.0, params, quad)


def test_suites_pass_and_deterministic():
    for name in SUITE_NAMES:
        first = run_suite(name, seed=11, trials=2)
        again = run_suite(name, seed=11, trials=2)
        assert first == again
        assert first and all(r.passed for r in first)


def test_run_suite_all_and_unknown():
    total = run_suite("all", seed=3, trials=1)
    parts = [run_suite(name, seed=3, trials=1) for name in SUITE_NAMES]
    assert total == [rec for part in parts for rec in part]
    with pytest.raises(ValueError, match="unknown suite"):
        run_suite("spectral", seed=3, trials=1)
