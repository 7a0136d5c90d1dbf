import numpy as np
import pytest

from lbkan.plant import (
    PlantSpec,
    Trajectory,
    default_drift,
    desired,
    sample_initial_state,
    sample_trajectory,
)


def reference_drift(x):
    # Independently typed copy of the drift field, scalar math only.
    x1, x2, x3, x4 = x
    return np.array(
        [
            4.0 * np.tanh(x1 + np.sin(np.pi * x2)),
            5.0 * np.exp(-(x2**2 + x3**2)) - 2.0,
            3.0 * np.sin(np.pi * (x1 + x4)) + 2.0 * np.cos(np.pi * (x3 + x2)),
            4.0 / (1.0 + np.exp(-(x1 - x2))) + np.sin(2.0 * x4) - 2.0,
        ]
    )


def test_drift_at_origin():
    assert default_drift(np.zeros(4)) == pytest.approx([0.0, 3.0, 2.0, 0.0], abs=1e-15)


def test_drift_fourth_component():
    x = np.array([0.0, 0.0, 0.0, np.pi / 4])
    assert default_drift(x)[3] == pytest.approx(4.0 / 2.0 + 1.0 - 2.0, abs=1e-14)


def test_drift_matches_reference_copy():
    rng = np.random.default_rng(0)
    for _ in range(100):
        x = rng.uniform(-8, 8, 4)
        assert np.max(np.abs(default_drift(x) - reference_drift(x))) <= 1e-14


def test_drift_batched():
    rng = np.random.default_rng(1)
    xs = rng.uniform(-8, 8, (7, 4))
    fs = default_drift(xs)
    for i in range(7):
        assert np.array_equal(fs[i], default_drift(xs[i]))


def test_disturbance():
    plant = PlantSpec()
    assert plant.disturbance(0.0) == pytest.approx([0.1] * 4, abs=1e-15)
    assert plant.disturbance(2 * np.pi / 0.5) == pytest.approx([0.1] * 4, abs=1e-12)
    assert plant.disturbance(np.pi) == pytest.approx([0.0] * 4, abs=1e-15)


def test_desired_at_zero():
    xd, xd_dot = desired(0.0, a=0.8, b=0.4, c=0.0)
    assert np.all(xd == 0.0)
    assert xd_dot == pytest.approx([0.8 * 0.4] * 4, abs=1e-15)


def test_desired_quarter_phase():
    xd, xd_dot = desired(0.0, a=1.0, b=0.3, c=np.pi / 2)
    assert xd == pytest.approx([1.0] * 4, abs=1e-15)
    assert xd_dot == pytest.approx([0.0] * 4, abs=1e-15)


def test_desired_derivative_finite_difference():
    rng = np.random.default_rng(2)
    h = 1e-6
    for _ in range(50):
        a, b, c = rng.uniform(0.5, 1.5), rng.uniform(0.2, 0.5), rng.uniform(0, np.pi)
        t = rng.uniform(0, 100)
        _, xd_dot = desired(t, a, b, c)
        fd = (desired(t + h, a, b, c)[0] - desired(t - h, a, b, c)[0]) / (2 * h)
        assert np.max(np.abs(xd_dot - fd)) <= 1e-6 * max(1.0, np.max(np.abs(fd)))


def test_desired_bounds():
    traj = Trajectory(a=1.5, b=0.5, c=1.0)
    t = np.linspace(0, 200, 5000)
    xd, xd_dot = traj.desired(t)
    assert np.all(np.linalg.norm(xd, axis=-1) <= 1.5 * 2.0 + 1e-12)
    assert np.all(np.linalg.norm(xd_dot, axis=-1) <= 1.5 * 0.5 * 2.0 + 1e-12)


def test_sampling_ranges():
    rng = np.random.default_rng(3)
    for _ in range(100):
        tr = sample_trajectory(rng)
        assert 0.5 <= tr.a <= 1.5
        assert 0.2 <= tr.b <= 0.5
        assert 0.0 <= tr.c <= np.pi
        x0 = sample_initial_state(rng)
        assert x0.shape == (4,)
        assert np.all(np.abs(x0) <= 8.0)
