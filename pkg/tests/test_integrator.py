import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from phlab.core import ALL_ROOTS, ONE, Params, State, hamiltonian_array
from phlab.integrator import (PathSpec, PathThroughOrigin, Tolerances, VaultRadiusTooLarge,
                              continue_to_point, integrate, vault, vault_radius)
from phlab.laurent import laurent_expand

GENERIC = Params(0.3 + 0.1j, -0.2 + 0.4j)
SEED = State(0, 0.4 + 0.1j, -0.3 + 0.2j)
ALPHA0 = 0.5 * (-1 + 3 * math.sqrt(3) * 1j)


def test_zero_solution_stays_zero():
    traj = integrate(State(1, 0, 0), Params(0, 0), PathSpec.polyline([1, 3 + 2j, -1 + 4j]))
    assert np.max(np.abs(traj.p)) < 1e-14 and np.max(np.abs(traj.q)) < 1e-14
    assert traj.poles == []


def test_polynomial_solution():
    traj = integrate(State(1, -1, -1), Params(1, -1), PathSpec.segment(1, 5))
    assert abs(traj.p[-1] + 5) < 1e-9 and abs(traj.q[-1] + 5) < 1e-9


def test_inverse_solution():
    traj = integrate(State(1, 1, -1), Params(-1, 1), PathSpec.segment(1, 2))
    assert abs(traj.p[-1] - 0.5) < 1e-9 and abs(traj.q[-1] + 0.5) < 1e-9


def test_path_through_origin_pole():
    with pytest.raises(PathThroughOrigin):
        integrate(State(-1, -1, 1), Params(-1, 1), PathSpec.segment(-1, 1))


@pytest.fixture(scope="module")
def fk():
    from phlab.riccati import make_first_kind
    return make_first_kind(ONE, ALPHA0)


# a pole of the first-kind solution above (residue 1, h = 0)
LAM = 2.8482269984423514 - 0.8612781062616675j


def test_hamiltonian_conservation_with_poles(fk):
    tol = Tolerances(rel=1e-12, abs=1e-14)
    a, b = LAM - 0.6, LAM + 0.5
    traj = integrate(fk.state(a), fk.params, PathSpec.segment(a, b), tol, spacing=0.01)
    assert len(traj.poles) == 1
    rec = traj.poles[0]
    assert abs(rec.lam - LAM) < 1e-8 and rec.residue == ONE and abs(rec.h) < 1e-6
    H = hamiltonian_array(traj.z, traj.p, traj.q, fk.params.alpha, fk.params.beta)
    # int H' = int pq is continued across the pole with the Laurent series, and
    # H has residue 1 there, so H(b) - H(a) = int pq holds on the straight path
    d = (H - H[0]) - traj.int_pq
    assert np.max(np.abs(d)) < 1e-8 * np.max(np.abs(H[np.abs(traj.z - LAM) > 0.1]))


def test_samples_ordered_and_clear_of_poles():
    traj = integrate(SEED, GENERIC, PathSpec.segment(0, 6 + 5j), spacing=0.02)
    s = np.abs(traj.z - traj.z[0])
    assert np.all(np.diff(s) > 0)
    for rec in traj.poles:
        assert np.min(np.abs(traj.z - rec.lam)) > 1e-4 / abs(rec.lam)
        assert rec.residue in ALL_ROOTS


def test_residue_margins_along_random_paths(rng):
    for _ in range(3):
        end = complex(*rng.uniform(-7, 7, 2))
        traj = integrate(SEED, GENERIC, PathSpec.segment(0, end))
        for rec in traj.poles:
            m = laurent_expand(GENERIC, rec.residue, rec.lam, rec.h, 16)
            ring = rec.lam + 0.1 / abs(rec.lam) * np.exp(2j * np.pi * np.arange(16) / 16)
            p, _ = m.eval(ring)
            res = np.mean(p * (ring - rec.lam))
            assert abs(res - rec.residue.value) < 1e-8


def test_vault_is_model_evaluation():
    par = Params(0.2, -0.7j)
    m = laurent_expand(par, ALL_ROOTS[1], 4 + 1j, 0.3 - 0.2j, 16)
    rv = vault_radius(m.record.lam)
    entry = m.state(m.record.lam - 0.9 * rv)
    out = vault(m.record, 16, entry, m.record.lam + 0.9 * rv, par)
    p, q = m.eval(m.record.lam + 0.9 * rv)
    assert out.p == p and out.q == q
    back = vault(m.record, 16, out, entry.z, par)
    assert abs(back.p - entry.p) < 1e-8 * abs(entry.p) and abs(back.q - entry.q) < 1e-8 * abs(entry.q)
    with pytest.raises(VaultRadiusTooLarge):
        vault(m.record, 16, entry, m.record.lam + 3 * rv, par)


def test_vault_against_riccati_detour(fk):
    """Straight path through a first-kind pole versus the scalar Riccati equation
    integrated on an arc that keeps away from it."""
    par = fk.params
    a, b = LAM - 0.6, LAM + 0.6
    start = fk.state(a)
    traj = integrate(start, par, PathSpec.segment(a, b), Tolerances(rel=1e-12, abs=1e-14))
    assert len(traj.poles) == 1
    c, r = (a + b) / 2, abs(b - a) / 2

    def f(t, y):
        z = c + r * np.exp(1j * (math.pi - t))
        dz = -1j * r * np.exp(1j * (math.pi - t))
        p = y[0] + 1j * y[1]
        dp = (-par.alpha - z * z + z * p - p * p) * dz
        return [dp.real, dp.imag]

    sol_ivp = solve_ivp(f, (0, math.pi), [start.p.real, start.p.imag], method="DOP853",
                        rtol=1e-12, atol=1e-12)
    p_ref = sol_ivp.y[0, -1] + 1j * sol_ivp.y[1, -1]
    assert abs(traj.p[-1] - p_ref) < 1e-6 * (1 + abs(p_ref))
    # the class relation q = z - p survives the vault
    assert abs(traj.p[-1] + traj.q[-1] - b) < 1e-6


def test_continue_to_point():
    assert continue_to_point(SEED, GENERIC, SEED.z) == SEED
    one = continue_to_point(SEED, GENERIC, 1.2 + 0.7j)
    two = integrate(SEED, GENERIC, PathSpec.polyline([0, 0.7 + 0.1j, 1.2 + 0.7j])).final
    assert abs(one.p - two.p) < 1e-9 and abs(one.q - two.q) < 1e-9


def test_reversal_returns_initial_state():
    tol = Tolerances()
    fwd = integrate(SEED, GENERIC, PathSpec.segment(0, 1.5 - 1j), tol).final
    back = integrate(fwd, GENERIC, PathSpec.segment(fwd.z, 0), tol).final
    assert abs(back.p - SEED.p) < 10 * tol.rel and abs(back.q - SEED.q) < 10 * tol.rel


def test_leg_through_pole_matches_detour(fk):
    a, b = LAM - 0.5j, LAM + 0.5j
    s0 = fk.state(a)
    straight = integrate(s0, fk.params, PathSpec.segment(a, b))
    assert len(straight.poles) == 1
    side = integrate(s0, fk.params, PathSpec.polyline([a, LAM + 0.3 - 0.1j, LAM + 0.3 + 0.1j, b]))
    assert side.poles == []
    assert abs(side.p[-1] - straight.p[-1]) < 1e-7 * (1 + abs(straight.p[-1]))
    assert abs(side.q[-1] - straight.q[-1]) < 1e-7 * (1 + abs(straight.q[-1]))


def test_path_independence_on_pole_free_region():
    a, b = 0.5 + 0.5j, 1.5 + 1.2j
    s0 = continue_to_point(SEED, GENERIC, a)
    tol = Tolerances()
    e1 = integrate(s0, GENERIC, PathSpec.polyline([a, 1.5 + 0.5j, b]), tol).final
    e2 = integrate(s0, GENERIC, PathSpec.polyline([a, 0.5 + 1.2j, b]), tol).final
    assert abs(e1.p - e2.p) < 10 * tol.rel * (1 + abs(e1.p))


def test_circle_and_ray_paths():
    traj = integrate(State(2, -2, -2), Params(1, -1), PathSpec.circle(0, 2, 0, math.pi))
    assert abs(traj.z[-1] + 2) < 1e-12 and abs(traj.p[-1] - 2) < 1e-9
    traj = integrate(State(1j, -1j, -1j), Params(1, -1), PathSpec.ray(math.pi / 2, 1, 3))
    assert abs(traj.p[-1] + 3j) < 1e-9


def test_validation_errors():
    with pytest.raises(ValueError):
        PathSpec.polyline([1])
    with pytest.raises(ValueError):
        Tolerances(rel=-1)
    with pytest.raises(ValueError):
        Tolerances(vault_radius_factor=0.6)
    with pytest.raises(ValueError):
        integrate(State(1, 0, 0), Params(0, 0), PathSpec.segment(2, 3))


def test_jsonl_export():
    import io, json
    traj = integrate(SEED, GENERIC, PathSpec.segment(0, 1), spacing=0.5)
    buf = io.StringIO()
    traj.to_jsonl(buf)
    rows = [json.loads(x) for x in buf.getvalue().splitlines()]
    assert len(rows) == len(traj.z) and set(rows[0]) == {"z", "p", "q"}
