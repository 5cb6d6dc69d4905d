import math

import numpy as np
import pytest

from phlab.backlund import (BacklundStep, ClosedForm, DiagnosticsError, IdenticallySingular,
                            IntegratedSolution, Signature, StepKind, apply_B, apply_step, chain,
                            eq1_residual, format_chain, map_params, parse_chain, probe_points,
                            residue_transition, signature_map)
from phlab.core import ALL_ROOTS, OMEGA, OMEGA_BAR, ONE, W, WBAR, Params, State, hamiltonian_array
from phlab.laurent import PoleRecord, laurent_expand

ALPHA0 = 0.5 * (-1 + 3 * math.sqrt(3) * 1j)
ZERO = ClosedForm(lambda z: (0 * z, 0 * z), Params(0, 0), "zero")
GENERIC = IntegratedSolution(State(0, 0.4 + 0.1j, -0.3 + 0.2j), Params(0.3 + 0.1j, -0.2 + 0.4j))
ZS = probe_points(16, 2.0, 6.0, seed=5)


def clear_probes(sol, zs, k=24):
    p, q = sol.evaluate(zs)
    ok = np.abs(p) + np.abs(q) < 2 * (1 + np.abs(zs))
    return zs[ok][:k]


def test_parse_and_format():
    steps = parse_chain("Mw; B1;R;C;MW")
    assert [str(s) for s in steps] == ["Mw", "B1", "R", "C", "MW"]
    assert format_chain(steps) == "Mw;B1;R;C;MW"
    assert parse_chain("") == []
    for bad in ("X", "M", "B2", "Rw"):
        with pytest.raises(ValueError):
            parse_chain(bad)


def test_empty_chain_is_identity():
    assert chain([], GENERIC) is GENERIC


def test_M_inverse_pairs():
    for w in ALL_ROOTS:
        out = chain([BacklundStep(StepKind.M, w), BacklundStep(StepKind.M, w.conj())], GENERIC)
        assert abs(out.params.alpha - GENERIC.params.alpha) < 1e-15
        assert abs(out.params.beta - GENERIC.params.beta) < 1e-15
        zs = clear_probes(GENERIC, probe_points(40, 2, 5, seed=1))
        p0, q0 = GENERIC.evaluate(zs)
        p1, q1 = out.evaluate(zs)
        assert np.max(np.abs(p1 - p0)) < 1e-13 * np.max(np.abs(p0))
        assert np.max(np.abs(q1 - q0)) < 1e-13 * np.max(np.abs(q0))


def test_R_twice():
    out = chain("R;R", GENERIC)
    assert out.params == GENERIC.params
    zs = clear_probes(GENERIC, probe_points(40, 2, 5, seed=2))
    p0, q0 = GENERIC.evaluate(-zs)
    p1, q1 = out.evaluate(zs)
    assert np.max(np.abs(p1 + p0)) < 1e-12 * (1 + np.max(np.abs(p0)))
    assert np.max(np.abs(q1 + q0)) < 1e-12 * (1 + np.max(np.abs(q0)))
    assert np.max(eq1_residual(out, zs)) < 1e-7


@pytest.mark.parametrize("text", ["M1", "Mw", "MW", "R", "C"])
def test_trivial_steps_keep_zero_solution(text):
    out = chain(text, ZERO)
    p, q = out.evaluate(ZS)
    assert np.all(p == 0) and np.all(q == 0)
    assert out.params == map_params(parse_chain(text)[0], Params(0, 0))


def test_B1_on_zero_solution_is_inverse():
    out = apply_B(ONE, ZERO)
    assert out.params == Params(-1, 1)
    p, q = out.evaluate(ZS)
    assert np.max(np.abs(p - 1 / ZS)) < 1e-12 and np.max(np.abs(q + 1 / ZS)) < 1e-12
    assert np.max(eq1_residual(out, ZS)) < 1e-10


def test_B1_on_first_kind_is_singular(first_kind):
    with pytest.raises(IdenticallySingular) as exc:
        chain("Mw;Mw;Mw;B1", first_kind)
    assert exc.value.step_index == 3


def test_B_with_vanishing_numerator_is_identity():
    # omega alpha - conj(omega) beta + 1 = 0 for omega = w
    w = OMEGA
    beta = 0.3 - 0.2j
    alpha = (w.conjugate() * beta - 1) / w
    sol = ClosedForm(lambda z: (0.5 * z, -0.25 * z), Params(alpha, beta), "dummy")
    out = apply_step(BacklundStep(StepKind.B, W), sol)
    p0, q0 = sol.evaluate(ZS)
    p1, q1 = out.evaluate(ZS)
    assert np.max(np.abs(p1 - p0)) < 1e-13 * np.max(np.abs(p0))
    assert np.max(np.abs(q1 - q0)) < 1e-13 * np.max(np.abs(q0))


def test_diagnostics_on_inconsistent_class():
    # denominator w p + conj(w) q - z = 0 but parameters outside the class
    sol = ClosedForm(lambda z: (OMEGA_BAR * z / 2, OMEGA * z / 2), Params(0.1, 0.2), "fake")
    with pytest.raises(DiagnosticsError):
        apply_B(W, sol)


def test_hamiltonian_update_under_B1():
    out = apply_B(ONE, GENERIC)
    zs = clear_probes(out, clear_probes(GENERIC, probe_points(60, 2, 5, seed=3)))
    p, q = GENERIC.evaluate(zs)
    pt, qt = out.evaluate(zs)
    H = hamiltonian_array(zs, p, q, *GENERIC.params.as_tuple())
    Ht = hamiltonian_array(zs, pt, qt, *out.params.as_tuple())
    scale = 1 + np.abs(zs) ** 3
    assert np.max(np.abs((Ht - H) - (pt - p)) / scale) < 1e-10
    assert np.max(np.abs((pt - p) + (qt - q)) / scale) < 1e-10


def test_params_map_deficiency_ladder():
    out = Params(ALPHA0, ALPHA0 + 1)
    for st in parse_chain("MW;B1;MW;B1;MW"):
        out = map_params(st, out)
    assert abs(out.alpha + 0.5 * (1 + 3 * math.sqrt(3) * 1j)) < 1e-12
    assert abs(out.beta - 0.5 * (1 - 3 * math.sqrt(3) * 1j)) < 1e-12


@pytest.mark.parametrize("rho", [W, WBAR])
def test_param_bookkeeping_4k_plus_1(rho):
    a, b = 0.37 - 0.21j, 1.1 + 0.4j
    r, rb = rho.value, rho.conj().value
    cur = Params(a, b)
    for k in range(4):
        nxt = map_params(parse_chain(f"M{rho.tag}")[0], cur)
        # alpha_{4k+1} - beta_{4k+1} + 1 = conj(rho) alpha - rho beta + 1 + 3k
        assert abs(nxt.first_kind_defect - (rb * a - r * b + 1 + 3 * k)) < 1e-12
        for st in parse_chain(f"B1;M{rho.tag};B1"):
            nxt = map_params(st, nxt)
        cur = nxt
        assert abs(cur.alpha - (a + (k + 1) * r - (k + 1))) < 1e-12
        assert abs(cur.beta - (b - (k + 1) * rb + (k + 1))) < 1e-12


def test_residue_transition_rules():
    rec = PoleRecord(3 + 1j, ONE, 0.2)
    assert residue_transition(W, rec) == rec
    assert residue_transition(W, PoleRecord(3 + 1j, WBAR, 0.2)) is None


def test_residue_transition_refit():
    par = Params(0.3 + 0.1j, -0.2 + 0.4j)
    m = laurent_expand(par, ONE, 4 - 2j, 0.1 + 0.2j, 20)
    local = ClosedForm(lambda z: m.eval(z), par, "local series")
    rec = residue_transition(W, m.record, local)
    assert rec.residue == ONE and abs(rec.lam - m.record.lam) < 1e-6


def test_signature_maps():
    sig = Signature.from_tags("W1W1")
    assert signature_map(BacklundStep(StepKind.B, ONE), sig).tags == "w1w1"
    s = sig
    for w in (W, W, WBAR, WBAR):
        s = signature_map(BacklundStep(StepKind.M, w), s)
    assert s == sig
    # chain (A): <W1W1> -M_w-> <wWwW> -B1-> <WwWw> -M_w-> <w1w1> -B1-> <W1W1>
    seq = ["W1W1", "wWwW", "WwWw", "w1w1", "W1W1"]
    s = Signature.from_tags(seq[0])
    for st, want in zip(parse_chain("Mw;B1;Mw;B1"), seq[1:]):
        s = signature_map(st, s)
        assert s.tags == want
    # k = 1 ladder: <wWwW> -M_W-> <W1W1> -B1-> <w1w1> -M_W-> <WwWw> -B1-> <wWwW> -M_W-> <W1W1>
    seq = ["wWwW", "W1W1", "w1w1", "WwWw", "wWwW", "W1W1"]
    s = Signature.from_tags(seq[0])
    for st, want in zip(parse_chain("MW;B1;MW;B1;MW"), seq[1:]):
        s = signature_map(st, s)
        assert s.tags == want


def test_signature_validation():
    with pytest.raises(ValueError):
        Signature((ONE, ONE))
    assert abs(Signature.from_tags("1111").alternating_sum()) < 1e-15
    assert abs(Signature.from_tags("W1W1").alternating_sum()) > 1
