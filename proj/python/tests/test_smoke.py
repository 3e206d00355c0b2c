"""Smoke tests for the Python module: imports, frozen analytic references,
and a miniature run/sweep through the full configured pipeline."""

import math

import numpy as np
import pytest

import cmfb


def test_concurrence_of_bell_and_product_states():
    bell = np.zeros((4, 4), dtype=complex)
    psi = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / math.sqrt(2.0)
    bell = np.outer(psi, psi.conj())
    assert cmfb.concurrence(bell) == pytest.approx(1.0, abs=1e-12)

    product = np.zeros((4, 4), dtype=complex)
    product[0, 0] = 1.0
    assert cmfb.concurrence(product) == pytest.approx(0.0, abs=1e-12)


def test_collective_t0_state_is_maximally_entangled():
    rho = np.zeros((4, 4), dtype=complex)
    rho[1, 1] = 1.0  # T0 in the collective ordering {T1, T0, T-1, S}
    computational = cmfb.collective_to_computational(rho)
    assert computational.shape == (4, 4)
    assert np.trace(computational).real == pytest.approx(1.0, abs=1e-12)
    assert cmfb.concurrence(computational) == pytest.approx(1.0, abs=1e-12)


def test_frozen_analytic_references():
    # Closed-form steady target population for deterministic P feedback.
    assert cmfb.analytic_T0_steady(h=0.1, k=1.0, eta=0.4, alpha_p=0.2) == pytest.approx(
        0.579221, abs=1e-4
    )
    # Conditional second-moment fixed point and compensation factor.
    steady = cmfb.oscillator_steady()
    assert steady["converged"]
    assert steady["Vs"] == pytest.approx(1.186153, abs=1e-4)
    assert steady["compensation_alpha"] == pytest.approx(0.743448, abs=1e-4)


def test_invalid_config_raises_valueerror():
    with pytest.raises(ValueError):
        cmfb.run("[system]\nsystem = nonsense\n")


def test_two_qubit_miniature_run():
    result = cmfb.run(
        "[system]\nsystem = two_qubit\n"
        "[controller]\nfeedback = I\nalpha_i = 0.2\ntau_i = 3\n"
        "[ensemble]\nn_traj = 4\nbase_seed = 7\ndt = 0.01\nt_final = 2\n"
    )
    assert result["system"] == "twoqubit"
    assert result["observables"] == ["Tm1", "T0", "T1", "concurrence"]
    times = result["times"]
    assert times == sorted(times) and times[-1] == pytest.approx(2.0)
    conc = np.asarray(result["mean"][3])
    assert np.all(conc >= -1e-12) and np.all(conc <= 1.0 + 1e-12)
    assert result["positivity_warnings"] >= 0
    assert "steady_max_std" in result and math.isfinite(result["steady_max_std"])


def test_two_qubit_override_matches_config_key():
    base = (
        "[system]\nsystem = two_qubit\n"
        "[controller]\nfeedback = I\nalpha_i = 0.2\ntau_i = 3\n"
        "[ensemble]\nn_traj = 2\nbase_seed = 7\ndt = 0.01\nt_final = 1\n"
    )
    a = cmfb.run(base)
    b = cmfb.run(base.replace("base_seed = 7", "base_seed = 8"), ["base_seed=7"])
    assert a["mean"] == b["mean"]


def test_oscillator_miniature_sweep():
    result = cmfb.sweep(
        "[system]\nsystem = oscillator\n"
        "[controller]\nactuation = x_only\nfeedback = P\ntau_p = 0.25T\n"
        "[ensemble]\nn_traj = 3\nbase_seed = 11\ndt = 0.004T\nt_final = 40\n"
        "[sweep]\naxis = eta\nvalues = 0.4, 0.8\n"
    )
    assert result["axis"].lower() in {"eta", "efficiency"}
    assert len(result["points"]) == 2
    for point in result["points"]:
        assert point["feedback"] == "P"
        assert math.isfinite(point["delta_metric"])
