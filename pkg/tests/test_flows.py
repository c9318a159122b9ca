import numpy as np
import pytest
from numpy.testing import assert_allclose

from circlespray.algebra import energy, spray_s
from circlespray.diffeo import compose_field_with_diffeo, identity, rotation
from circlespray.flows import (
    BreakdownError,
    SprayState,
    Trajectory,
    TrajectoryVelocity,
    conservation_report,
    euler_arnold_rhs,
    eulerian_velocity,
    flow_from_velocity,
    integrate_euler_arnold,
    integrate_spray,
    spray_rhs,
    step_rk4,
    write_trajectory_csv,
)
from circlespray.harness.identities import mild_diffeo
from circlespray.inertia import make_inertia
from circlespray.spectral import PeriodicField, grid_points, make_field_from_modes, random_field

N = 128
x = grid_points(N)


@pytest.fixture(scope="module")
def A():
    return make_inertia(N, "helmholtz")


@pytest.fixture(scope="module")
def cos_run(A):
    u0 = make_field_from_modes(N, [(1, 1.0, 0.0)])
    return integrate_euler_arnold(A, u0, 1.0, 1e-3, record_every=10)


class TestRhs:
    def test_euler_arnold_cos(self, A):
        got = euler_arnold_rhs(A, make_field_from_modes(N, [(1, 1.0, 0.0)]))
        assert_allclose(got.values, 0.6 * np.sin(2 * x), atol=1e-14)

    def test_euler_arnold_zero_and_constant(self, A):
        assert euler_arnold_rhs(A, PeriodicField.zeros(N)).sup_norm() == 0.0
        assert euler_arnold_rhs(A, PeriodicField.constant(N, 0.9)).sup_norm() <= 1e-15

    def test_spray_at_identity(self, A, rng):
        u = random_field(N, rng)
        dphi, dv = spray_rhs(A, SprayState(identity(N), u))
        assert dphi is u
        assert_allclose(dv.values, spray_s(A, u).values, atol=1e-13)

    def test_spray_zero_velocity(self, A, rng):
        dphi, dv = spray_rhs(A, SprayState(mild_diffeo(N, rng), PeriodicField.zeros(N)))
        assert dphi.sup_norm() == 0.0 and dv.sup_norm() == 0.0

    def test_spray_rotated(self, A):
        c = 0.6
        dphi, dv = spray_rhs(A, SprayState(rotation(N, c), make_field_from_modes(N, [(1, 1.0, 0.0)])))
        # u = cos(x - c), so S(u) pulled back through x + c is 0.1 sin 2x
        assert_allclose(dv.values, 0.1 * np.sin(2 * x), atol=1e-13)

    def test_spray_is_conjugated_spray(self, A, rng):
        phi = mild_diffeo(N, rng)
        v = make_field_from_modes(N, [(1, 0.5, 0.2), (2, 0.1, 0.0)])
        u = eulerian_velocity(SprayState(phi, v))
        _, dv = spray_rhs(A, SprayState(phi, v))
        assert_allclose(dv.values, compose_field_with_diffeo(spray_s(A, u), phi).values, atol=1e-12)


class TestStep:
    def test_zero_rhs(self, rng):
        u = random_field(16, rng)
        assert np.array_equal(step_rk4(lambda s: PeriodicField.zeros(16), u, 0.1).values, u.values)

    def test_constant_state(self, A):
        c = PeriodicField.constant(N, 1.3)
        assert_allclose(step_rk4(lambda u: euler_arnold_rhs(A, u), c, 0.01).values, 1.3, atol=1e-15)

    def test_first_order_taylor(self, A):
        dt = 1e-3
        u0 = make_field_from_modes(N, [(1, 1.0, 0.0)])
        u1 = step_rk4(lambda u: euler_arnold_rhs(A, u), u0, dt)
        taylor = np.cos(x) + dt * 0.6 * np.sin(2 * x)
        assert np.max(np.abs(u1.values - taylor)) <= 1e-5

    def test_scalar_ode_order(self):
        # u' = -u on constants: exact RK4 amplification factor
        u = PeriodicField.constant(8, 1.0)
        dt = 0.1
        got = step_rk4(lambda v: -v, u, dt).values[0]
        assert_allclose(got, 1 - dt + dt**2 / 2 - dt**3 / 6 + dt**4 / 24, rtol=1e-15)

    def test_rejects_non_positive_dt(self):
        with pytest.raises(ValueError):
            step_rk4(lambda v: v, PeriodicField.zeros(8), 0.0)

    def test_spray_loses_monotonicity(self, A):
        # huge velocity with a steep profile folds phi within one step
        v = make_field_from_modes(N, [(1, 0.0, 50.0)])
        with pytest.raises(BreakdownError, match="monotonicity"):
            step_rk4(lambda s: spray_rhs(A, s), SprayState(identity(N), v), 0.1)


class TestEulerArnold:
    def test_zero(self, A):
        traj = integrate_euler_arnold(A, PeriodicField.zeros(N), 0.1, 1e-2)
        assert all(u.sup_norm() == 0.0 for u in traj.states)

    def test_constant_energy_closed_form(self, A):
        c = 0.75
        traj = integrate_euler_arnold(A, PeriodicField.constant(N, c), 1.0, 1e-2)
        expected = 0.5 * A.symbol[0] * c**2 * 2 * np.pi
        assert len(traj.times) == 101
        for u, rec in zip(traj.states, traj.diagnostics):
            assert np.array_equal(u.values, np.full(N, c))
            assert_allclose(rec.energy, expected, rtol=1e-15)

    def test_cos_energy_and_momentum(self, A, cos_run):
        rep = conservation_report(A, cos_run)
        assert rep["energy_drift"] <= 1e-8
        assert rep["momentum_mean_drift"] <= 1e-10
        assert not cos_run.breakdown
        assert_allclose(cos_run.diagnostics[0].energy, np.pi, rtol=1e-14)

    def test_recording(self, cos_run):
        assert len(cos_run.times) == 101
        assert_allclose(cos_run.times[-1], 1.0)

    @pytest.mark.parametrize("kind, params", [("sobolev", [2]), ("custom", list(1.0 + np.arange(65.0)))])
    def test_momentum_mean_any_symbol(self, kind, params):
        A = make_inertia(N, kind, params)
        u0 = make_field_from_modes(N, [(0, 0.3, 0.0), (1, 0.4, 0.2), (3, 0.0, 0.1)])
        rep = conservation_report(A, integrate_euler_arnold(A, u0, 0.2, 1e-3, 20))
        assert rep["momentum_mean_drift"] <= 1e-10

    def test_time_reversible(self, A):
        u0 = make_field_from_modes(N, [(1, 1.0, 0.0), (2, 0.0, 0.3)])
        fwd = integrate_euler_arnold(A, u0, 0.5, 1e-3, 500).final
        back = integrate_euler_arnold(A, -fwd, 0.5, 1e-3, 500).final
        assert (back + u0).sup_norm() <= 1e-7

    def test_non_divisible_dt(self, A):
        with pytest.raises(ValueError, match="divide"):
            integrate_euler_arnold(A, PeriodicField.zeros(N), 1.0, 0.3)

    def test_blow_up_is_flagged(self):
        # identity symbol (L2 metric, inviscid-Burgers-like) steepens and blows up
        A = make_inertia(16, "custom", [1.0] * 9)
        u0 = make_field_from_modes(16, [(1, 5.0, 0.0)])
        traj = integrate_euler_arnold(A, u0, 50.0, 0.5, 1)
        assert traj.breakdown
        assert traj.breakdown_time is not None
        assert np.all(np.isfinite(traj.final.values))


class TestSpray:
    def test_frozen_at_identity(self, A):
        traj = integrate_spray(A, SprayState(identity(N), PeriodicField.zeros(N)), 0.1, 1e-2)
        assert traj.final.phi.displacement.sup_norm() == 0.0

    def test_constant_rotation(self, A):
        c = 0.4
        traj = integrate_spray(A, PeriodicField.constant(N, c), 1.0, 1e-2, 10)
        for t, s in zip(traj.times, traj.states):
            assert_allclose(s.phi.displacement.values, c * t, atol=1e-13)
            assert_allclose(s.v.values, c, atol=1e-15)

    def test_cos_energy(self, A):
        u0 = make_field_from_modes(N, [(1, 1.0, 0.0)])
        traj = integrate_spray(A, u0, 0.5, 1e-3, 100)
        assert conservation_report(A, traj)["energy_drift"] <= 1e-6

    def test_spray_loses_monotonicity_is_reported(self, A):
        v = make_field_from_modes(N, [(1, 0.0, 50.0)])
        traj = integrate_spray(A, v, 1.0, 0.1)
        assert traj.breakdown and "monotonicity" in traj.message
        assert traj.times == [0.0]


class TestEulerianVelocity:
    def test_identity(self, rng):
        u = random_field(N, rng)
        assert_allclose(eulerian_velocity(SprayState(identity(N), u)).values, u.values, atol=1e-13)

    def test_rotation(self):
        c = 0.9
        v = make_field_from_modes(N, [(1, 1.0, 0.0)])
        got = eulerian_velocity(SprayState(rotation(N, c), v))
        assert_allclose(got.values, np.cos(x - c), atol=1e-14)

    def test_round_trip(self, rng):
        u = make_field_from_modes(N, [(1, 0.3, 0.5), (2, -0.2, 0.1)])
        for _ in range(5):
            phi = mild_diffeo(N, rng)
            v = compose_field_with_diffeo(u, phi)
            assert (eulerian_velocity(SprayState(phi, v)) - u).sup_norm() <= 1e-9


class TestFlowFromVelocity:
    def test_zero(self):
        phi = flow_from_velocity(lambda t: PeriodicField.zeros(N), 1.0, 0.1)
        assert phi.displacement.sup_norm() == 0.0

    def test_constant(self):
        phi = flow_from_velocity(lambda t: PeriodicField.constant(N, 1.25), 1.0, 0.1)
        assert_allclose(phi.displacement.values, 1.25, atol=1e-14)

    def test_time_dependent_rotation(self):
        # u(t) = t gives phi(T) = x + T^2 / 2, integrated exactly by RK4
        phi = flow_from_velocity(lambda t: PeriodicField.constant(N, t), 2.0, 0.25)
        assert_allclose(phi.displacement.values, 2.0, atol=1e-14)

    def test_matches_spray(self, A):
        u0 = make_field_from_modes(N, [(1, 1.0, 0.0)])
        T, dt = 0.5, 1e-3
        source = TrajectoryVelocity(A, integrate_euler_arnold(A, u0, T, dt, 1))
        phi = flow_from_velocity(source, T, dt)
        spray_phi = integrate_spray(A, u0, T, dt, 500).final.phi
        assert (phi.displacement - spray_phi.displacement).sup_norm() <= 1e-6

    def test_source_range_checked(self, A):
        src = TrajectoryVelocity(A, integrate_euler_arnold(A, PeriodicField.zeros(N), 0.1, 0.05))
        with pytest.raises(ValueError, match="outside"):
            src(0.2)

    def test_fold_raises(self):
        u = make_field_from_modes(N, [(1, 0.0, 5.0)])
        with pytest.raises(BreakdownError):
            flow_from_velocity(lambda t: u, 2.0, 0.01)


class TestReport:
    def test_constant_rotation_zero_drift(self, A):
        rep = conservation_report(A, integrate_euler_arnold(A, PeriodicField.constant(N, 2.0), 0.5, 0.05))
        assert rep["energy_drift"] == 0.0 and rep["momentum_mean_drift"] == 0.0

    def test_zero_trajectory(self, A):
        rep = conservation_report(A, integrate_euler_arnold(A, PeriodicField.zeros(N), 0.5, 0.05))
        assert rep["energy_drift"] == 0.0 and rep["momentum_mean_drift"] == 0.0

    def test_empty(self, A):
        with pytest.raises(ValueError):
            conservation_report(A, Trajectory())

    def test_cos_run(self, A, cos_run):
        rep = conservation_report(A, cos_run)
        assert rep["energy_drift"] <= 1e-8 and rep["momentum_mean_drift"] <= 1e-10

    def test_csv(self, tmp_path, cos_run, A):
        path = tmp_path / "traj.csv"
        write_trajectory_csv(cos_run, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "t,energy,momentum_mean,l2_norm,spectral_tail"
        assert len(lines) == len(cos_run.times) + 1
        assert float(lines[1].split(",")[1]) == cos_run.diagnostics[0].energy
        assert_allclose(energy(A, cos_run.states[0]), cos_run.diagnostics[0].energy)
