import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from ringwell.core import PHI, RingState, evaluate, psi_state, ring_energy
from ringwell.energy import delta_E, truncated_energy
from ringwell.insertion import (
    EntanglementMode,
    PointClass,
    build_extended_after,
    chamber_probabilities,
    classify_point,
    insert_double,
    insert_single,
)
from ringwell.overlap import closed_form_coeff, family_oracle

PI = math.pi
TWO_MODE = RingState(((1, 1.0, 0.0), (2, 1.0, 0.0))) * (1 / math.sqrt(2))


def test_classify_examples():
    assert classify_point(PHI, 0.0) is PointClass.fixed_node
    assert classify_point(PHI, PI / 4) is PointClass.non_nodal
    assert classify_point(TWO_MODE, 2 * PI / 3) is PointClass.transitory_node
    assert classify_point(TWO_MODE, PI) is PointClass.fixed_node


def test_transitory_node_moves_in_time():
    # time-sampled oracle: exp(-i E1 t) sin(t0) + exp(-i E2 t) sin(2 t0)
    t0 = 2 * PI / 3
    t = np.linspace(0, 3, 301)
    amp = np.exp(-1j * ring_energy(1) * t) * math.sin(t0) + np.exp(-1j * ring_energy(2) * t) * math.sin(2 * t0)
    assert abs(amp[0]) < 1e-12
    assert np.abs(amp[1:]).max() > 0.5


@given(st.floats(1e-3, PI / 2 - 1e-3))
def test_phi_nodal_structure(alpha):
    assert classify_point(PHI, 0.0) is PointClass.fixed_node
    assert classify_point(PHI, alpha) is PointClass.non_nodal


def test_insert_single_nodal():
    coeffs = insert_single(PHI, 0.0, 10).coeffs
    expected = np.zeros(10)
    expected[1] = 1.0
    np.testing.assert_allclose(coeffs, expected, atol=1e-12)
    shifted = insert_single(psi_state(PI / 4), PI / 4, 10).coeffs
    np.testing.assert_allclose(shifted, expected, atol=1e-12)


def test_insert_single_cos_odd_modes():
    coeffs = insert_single(RingState.cos(), 0.0, 5).coeffs.real
    # 30-digit mpmath quadrature of (1/pi) int cos(t) sin(n t / 2)
    expected = [-0.42441318157838756, 0.0, 0.76394372684109761, 0.0, 0.30315227255599112]
    np.testing.assert_allclose(coeffs, expected, atol=1e-14)
    n = np.array([1, 3, 5])
    np.testing.assert_allclose(coeffs[n - 1], 4 * n / (PI * (n**2 - 4)), atol=1e-15)


def test_nodal_insertion_energy_free():
    for N in (2, 10, 200):
        assert truncated_energy(insert_single(PHI, 0.0, N)) == pytest.approx(ring_energy(1), abs=1e-12)


@given(st.floats(0.0, 2 * PI))
def test_rotation_covariance(beta):
    ref = insert_single(PHI, 0.0, 30).coeffs
    rotated = insert_single(RingState.sin(1, shift=beta), beta, 30).coeffs
    np.testing.assert_allclose(rotated, ref, atol=1e-12)


@pytest.mark.parametrize("state, left, right", [
    (PHI, "a", "A"),
    (psi_state(PI / 4), "c", "C"),
    (RingState.cos(), "b", "B"),
])
def test_insert_double_matches_closed_forms(state, left, right):
    two = insert_double(state, PI / 4, 50)
    n = np.arange(1, 51)
    np.testing.assert_allclose(two.left_chamber.coeffs.real, closed_form_coeff(left, n, PI / 4), atol=1e-12)
    np.testing.assert_allclose(two.right_chamber.coeffs.real, closed_form_coeff(right, n, PI / 4), atol=1e-12)


def test_insert_double_against_quadrature():
    two_phi = insert_double(PHI, PI / 4, 50)
    two_psi = insert_double(psi_state(PI / 4), PI / 4, 50)
    for n in range(1, 51, 7):
        assert abs(two_phi.left_chamber.coeffs[n - 1].real - family_oracle("a", n, PI / 4)) < 1e-10
        assert abs(two_psi.right_chamber.coeffs[n - 1].real - family_oracle("C", n, PI / 4)) < 1e-10


def test_insert_double_zero_state():
    two = insert_double(RingState(), PI / 4, 10)
    assert not np.any(two.left_chamber.coeffs) and not np.any(two.right_chamber.coeffs)


def test_insert_double_rejects_alpha():
    with pytest.raises(ValueError):
        insert_double(PHI, PI / 2, 10)


@settings(max_examples=50)
@given(st.floats(-0.7, 0.7), st.floats(-0.7, 0.7), st.floats(0.01, PI / 2 - 0.01))
def test_double_insertion_is_linear(a, b, alpha):
    s1, s2 = PHI, RingState.cos(2)
    combined = insert_double(a * s1 + b * s2, alpha, 40)
    one, two = insert_double(s1, alpha, 40), insert_double(s2, alpha, 40)
    for c, x, y in zip(combined.chambers, one.chambers, two.chambers):
        np.testing.assert_allclose(c.coeffs, a * x.coeffs + b * y.coeffs, atol=1e-12)


def test_chamber_probabilities_match_quadrature():
    state = RingState(((1, 0.6, 0.0), (3, 0.0, 0.8)))
    p_left, p_right = chamber_probabilities(state, 0.9)
    ref, _ = quad(lambda t: evaluate(state, t) ** 2, 0, 0.9)
    assert p_left == pytest.approx(ref, abs=1e-14)
    assert p_left + p_right == pytest.approx(1.0, abs=1e-15)


def test_extended_phi_tags_alpha_barrier():
    ext = build_extended_after(PHI, PI / 4, 3)
    assert ext.nodal_barrier == "zero"
    assert len(ext.terms) == 9
    for term in ext.terms:
        n, m = term.particle
        assert term.barrier0.energy_tag == 0.0
        assert term.barrierA.location == PI / 4
        assert term.particle_energy_change == pytest.approx(delta_E(n, m, "phi", PI / 4), rel=1e-12)
        assert term.barrierA.energy_tag == -term.particle_energy_change


def test_extended_psi_mirror():
    ext = build_extended_after(psi_state(PI / 4), PI / 4, 3)
    assert ext.nodal_barrier == "alpha"
    for term in ext.terms:
        n, m = term.particle
        assert term.barrierA.energy_tag == 0.0
        assert -term.barrier0.energy_tag == pytest.approx(delta_E(n, m, "psi", PI / 4), rel=1e-12)


def test_extended_per_chamber_two_terms():
    ext = build_extended_after(PHI, PI / 4, 2, EntanglementMode.per_chamber)
    assert len(ext.terms) == 2
    assert ext.weight + ext.defect == pytest.approx(1.0, abs=1e-15)


def test_extended_weights_raw_with_defect():
    small = build_extended_after(PHI, PI / 4, 5)
    large = build_extended_after(PHI, PI / 4, 200)
    assert small.defect == pytest.approx(abs(1 - small.weight), abs=1e-15)
    assert large.defect < small.defect
    assert large.weight < 1.0


def test_extended_rejects_nonnodal_state():
    with pytest.raises(ValueError):
        build_extended_after(RingState.cos(), PI / 4, 3)
