"""Incident plane wave: values, derivatives, validation."""

import numpy as np
import pytest

from emscat.waves import IncidentWave, default_wave


def test_field_at_origin_is_amplitude():
    wave = default_wave()
    np.testing.assert_array_equal(wave.field(np.zeros(3)), np.array([1.0, 0.0, 0.0]))


def test_field_reference_value():
    # amplitude (1,0,0), direction (0,1,0), k = 1.0472e5, x = 1e-6 (1,1,1)
    wave = IncidentWave(
        amplitude=np.array([1.0, 0.0, 0.0]),
        direction=np.array([0.0, 1.0, 0.0]),
        wavenumber=1.0472e5,
    )
    field = wave.field(np.array([1e-6, 1e-6, 1e-6]))
    assert field[0] == pytest.approx(0.9945 + 0.1045j, abs=1e-4)
    assert field[1] == 0.0 and field[2] == 0.0


def test_directional_derivative_matches_ik():
    wave = default_wave()
    x = np.array([2e-6, -1e-6, 3e-6])
    k = wave.wavenumber
    for h in (1e-3 / k, 1e-4 / k):
        fd = (wave.field(x + h * wave.direction) - wave.field(x)) / h
        np.testing.assert_allclose(fd, 1j * k * wave.field(x), rtol=2 * h * k)


def test_curl_closed_form_and_fd():
    wave = default_wave()
    k = wave.wavenumber
    x = np.array([1e-6, 2e-6, -1e-6])
    expected = (
        1j * k * np.cross(wave.direction, wave.amplitude)
        * np.exp(1j * k * (wave.direction @ x))
    )
    np.testing.assert_allclose(wave.curl(x), expected, rtol=1e-14)

    h = 1e-3 / k
    curl_fd = np.zeros(3, dtype=complex)
    for p in range(3):
        e = np.zeros(3)
        e[p] = h
        jac_col = (wave.field(x + e) - wave.field(x - e)) / (2 * h)
        # accumulate curl components from the Jacobian column d E / d x_p
        curl_fd += np.cross(np.eye(3)[p], jac_col)
    np.testing.assert_allclose(curl_fd, wave.curl(x), rtol=1e-6)


def test_curl_direction_hand_value():
    # (0,1,0) x (1,0,0) = (0,0,-1)
    wave = default_wave()
    curl0 = wave.curl(np.zeros(3))
    np.testing.assert_allclose(
        curl0, 1j * wave.wavenumber * np.array([0.0, 0.0, -1.0]), rtol=1e-15
    )


def test_field_batch_shape():
    wave = default_wave()
    pts = np.zeros((4, 3))
    pts[:, 1] = np.linspace(0, 1e-6, 4)
    vals = wave.field(pts)
    assert vals.shape == (4, 3)
    np.testing.assert_allclose(vals[0], [1.0, 0.0, 0.0])


def test_transversality_enforced():
    with pytest.raises(ValueError, match="transverse"):
        IncidentWave(
            amplitude=np.array([0.0, 0.0, 1.0]),
            direction=np.array([0.0, 0.0, 1.0]),
            wavenumber=1.0,
        )


def test_unit_direction_enforced():
    with pytest.raises(ValueError, match="unit"):
        IncidentWave(
            amplitude=np.array([1.0, 0.0, 0.0]),
            direction=np.array([0.0, 2.0, 0.0]),
            wavenumber=1.0,
        )


def test_positive_wavenumber_enforced():
    with pytest.raises(ValueError, match="wavenumber"):
        IncidentWave(
            amplitude=np.array([1.0, 0.0, 0.0]),
            direction=np.array([0.0, 1.0, 0.0]),
            wavenumber=0.0,
        )
