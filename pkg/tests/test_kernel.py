import math

import numpy as np
import pytest

import oracles
from chbergman import (BallPoint, KernelConstant, Orbit, bergman_matrix, enumerate_orbit,
                       hyp_distance, kernel_grad, kernel_hessian, kernel_sum, kernel_term,
                       random_element, volume_ratio)
from chbergman.kernel import (conjugate_form_grad, conjugate_form_hessian, diagonal_derivatives,
                              diagonal_raw)
from chbergman.numerics import wirtinger_fd
from chbergman.presets import boost_rotation_spec, boost_spec, schottky_spec
from conftest import random_ball_points

O = BallPoint(0, 0)


def _identity_orbit(z):
    return Orbit.from_matrices([np.eye(3)], z, z)


def test_term_matches_oracle_and_printed_modulus(rng):
    pts = random_ball_points(rng, 40, 0.8)
    for i in range(20):
        g = random_element(i)
        z, w = pts[2 * i], pts[2 * i + 1]
        for m in (9, 15):
            t = kernel_term(g, z, w, m)
            assert t == pytest.approx(oracles.series_term(g.matrix, z, w, m), rel=1e-11)
            assert abs(t) == pytest.approx(abs(oracles.literal_term(g.matrix, z, w, m)), rel=1e-11)


def test_term_modulus_is_cosh_power(rng):
    pts = random_ball_points(rng, 100, 0.8)
    for i in range(50):
        g = random_element(100 + i)
        z, w = pts[2 * i], pts[2 * i + 1]
        gw = oracles.act(g.matrix, w)
        d = hyp_distance(z, BallPoint(gw[0], gw[1]))
        for m in (9, 30):
            val = (z.weight * w.weight) ** (m / 2) * abs(kernel_term(g, z, w, m))
            assert val == pytest.approx(math.cosh(d / 2) ** -m, rel=1e-10)


def test_term_rejects_bad_weight():
    with pytest.raises(ValueError):
        kernel_term(random_element(0), O, O, 0)


def test_boost_series_at_origin():
    orb = enumerate_orbit(boost_spec(), O, O, 3)
    kv = kernel_sum(orb, 9)
    assert kv.raw == pytest.approx(1.040334350280972146491717273946945819048, rel=1e-14)
    assert kv.petersson == pytest.approx(kv.raw.real, rel=1e-15)
    assert kv.term_count == 7
    assert kernel_sum(orb, 9, KernelConstant(2.5)).petersson == pytest.approx(2.5 * kv.petersson)


def test_ledger_and_triangle_inequality():
    z, w = BallPoint(0.1j, 0.2), BallPoint(-0.3, 0.05)
    orb = enumerate_orbit(boost_rotation_spec(), z, w, 3)
    kv = kernel_sum(orb, 9, ledger=True)
    assert len(kv.per_term_ledger) == len(orb)
    mods = [e.modulus for e in kv.per_term_ledger]
    assert kv.petersson <= math.fsum(mods) * (1 + 1e-14)
    assert np.allclose(mods, np.cosh(orb.dists / 2) ** -9, rtol=1e-10)


def test_constant_validation():
    with pytest.raises(ValueError):
        KernelConstant(0.0)
    with pytest.raises(ValueError):
        KernelConstant(float("inf"))


def test_hermitian_symmetry(rng):
    spec = schottky_spec()
    for z, w in zip(random_ball_points(rng, 5, 0.6), random_ball_points(rng, 5, 0.6)):
        a = kernel_sum(enumerate_orbit(spec, z, w, 3), 15).petersson
        b = kernel_sum(enumerate_orbit(spec, w, z, 3), 15).petersson
        assert a == pytest.approx(b, rel=1e-10)


def test_equivariance_under_conjugation(rng):
    z, w = BallPoint(0.2, 0.1j), BallPoint(-0.1, 0.3)
    orb = enumerate_orbit(schottky_spec(), z, w, 3)
    eta = random_element(4).matrix
    eta_inv = np.diag([1, 1, -1]) @ eta.conj().T @ np.diag([1, 1, -1])
    conj = eta @ orb.matrices @ eta_inv
    ez = BallPoint(*oracles.act(eta, z))
    ew = BallPoint(*oracles.act(eta, w))
    moved = Orbit.from_matrices(conj, ez, ew, words=orb.words)
    assert kernel_sum(moved, 9).petersson == pytest.approx(kernel_sum(orb, 9).petersson, rel=1e-8)


def test_diagonal_paths_agree(rng):
    spec = boost_rotation_spec()
    for z in random_ball_points(rng, 10, 0.7):
        orb = enumerate_orbit(spec, z, z, 3)
        a = kernel_sum(orb, 15).raw
        b = diagonal_raw(orb.matrices, z, 15)
        assert abs(a - b) <= 1e-10 * abs(a)


def test_identity_orbit_derivatives_match_hand_formula():
    z = BallPoint(0.3 - 0.2j, 0.1j)
    der = diagonal_derivatives(_identity_orbit(z), 9)
    assert der.value == pytest.approx(z.weight ** -9, rel=1e-14)
    assert np.allclose(der.hess, oracles.identity_kernel_hessian(z, 9), rtol=1e-13, atol=0)


def _fd_check(orb, z, m):
    F = lambda q: diagonal_raw(orb.matrices, q, m)
    h = 1e-5 * z.weight
    der = diagonal_derivatives(orb, m)
    fd_g = np.array([wirtinger_fd(F, z, c, h) for c in ("z1", "z2", "zbar1", "zbar2")])
    fd_h = np.array([[wirtinger_fd(F, z, (f"z{i}", f"zbar{j}"), h) for j in (1, 2)]
                     for i in (1, 2)])
    eg = np.linalg.norm(der.grad - fd_g) / np.linalg.norm(der.grad)
    eh = np.linalg.norm(der.hess - fd_h) / np.linalg.norm(der.hess)
    return eg, eh


def test_derivatives_against_finite_differences(rng):
    spec = schottky_spec()
    for z in random_ball_points(rng, 6, 0.8):
        orb = enumerate_orbit(spec, z, z, 2)
        for m in (9, 15):
            eg, eh = _fd_check(orb, z, m)
            assert eg <= 1e-6
            assert eh <= 1e-5


def test_scaled_derivative_accessors():
    z = BallPoint(0.1, 0.2)
    orb = enumerate_orbit(boost_spec(), z, z, 2)
    der = diagonal_derivatives(orb, 9)
    c = KernelConstant(3.0)
    assert kernel_grad(orb, 9, c, "zbar2") == pytest.approx(3.0 * der.grad[3])
    assert kernel_hessian(orb, 9, c, 2, 1) == pytest.approx(3.0 * der.hess[1, 0])
    with pytest.raises(ValueError):
        kernel_grad(orb, 9, c, "w")
    with pytest.raises(ValueError):
        kernel_hessian(orb, 9, c, 0, 1)
    with pytest.raises(ValueError):
        diagonal_derivatives(enumerate_orbit(boost_spec(), z, O, 1), 9)


def test_conjugate_forms_match_exact_derivatives(rng):
    spec = boost_rotation_spec()
    for z in random_ball_points(rng, 5, 0.7):
        orb = enumerate_orbit(spec, z, z, 3)
        der = diagonal_derivatives(orb, 9)
        for j in (1, 2):
            assert conjugate_form_grad(orb, 9, j) == pytest.approx(
                np.conj(der.grad[j - 1]), rel=1e-10)
            for i in (1, 2):
                assert conjugate_form_hessian(orb, 9, i, j) == pytest.approx(
                    np.conj(der.hess[j - 1, i - 1]), rel=1e-10)


def test_single_term_kernel_has_flat_ratio():
    z = O
    orb = _identity_orbit(z)
    assert np.allclose(bergman_matrix(z, 3, orb), 0, atol=1e-12)
    assert volume_ratio(z, 3, orb).ratio <= 1e-20
    # with the printed 1/pi the identity kernel gives (9(1 - 1/pi))^2 / pi^2
    lit = bergman_matrix(z, 3, orb, literal_pi=True)
    ratio = abs(np.linalg.det(lit)) / math.pi ** 2
    assert ratio == pytest.approx(3.813811859480473389399239429077235424665, rel=1e-13)


def test_split_and_direct_hessians_agree(rng):
    spec = schottky_spec()
    for z in random_ball_points(rng, 6, 0.7):
        orb = enumerate_orbit(spec, z, z, 3)
        for k in (3, 5):
            a = bergman_matrix(z, k, orb, method="split")
            b = bergman_matrix(z, k, orb, method="direct")
            scale = 3 * k / z.weight ** 2
            assert np.max(np.abs(a - b)) <= 1e-9 * scale


def test_bergman_matrix_is_hermitian_for_inverse_closed_orbits(rng):
    spec = boost_rotation_spec()
    for z in random_ball_points(rng, 5, 0.7):
        h = bergman_matrix(z, 3, enumerate_orbit(spec, z, z, 3))
        assert np.allclose(h, h.conj().T, atol=1e-10 * np.max(np.abs(h)))


def test_volume_ratio_decomposition(rng):
    spec = boost_rotation_spec()
    for z in random_ball_points(rng, 10, 0.7):
        orb = enumerate_orbit(spec, z, z, 3)
        for k in (3, 5, 10):
            mr = volume_ratio(z, k, orb)
            assert abs(mr.det - mr.t_sum) <= 1e-9 * max(abs(mr.det), mr.t_scale)
            assert mr.ratio == pytest.approx(z.weight ** 3 * abs(mr.det) / math.pi ** 2)
            assert np.array_equal(mr.matrix, np.array([[mr.m11, mr.m12], [mr.m21, mr.m22]]))


def test_bergman_matrix_requires_matching_orbit():
    with pytest.raises(ValueError):
        bergman_matrix(BallPoint(0.1, 0), 3, _identity_orbit(O))
