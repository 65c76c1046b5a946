"""Tests for time evolution, fidelity measures and runtime scaling."""

import numpy as np
import pytest
import scipy.linalg

from stepgap.dynamics import (
    EvolutionResult,
    ScalingRow,
    _krylov_expm_apply,
    evolution_target,
    evolve,
    fidelity,
    runtime_for_fidelity,
)
from stepgap.models import InterpolationPath, ising_endpoints, make_path
from stepgap.pauli import (
    OperatorSum,
    PauliString,
    basis_state,
    ghz_state,
    uniform_superposition,
)
from stepgap.spectra import lowest_eigenpairs

RNG = np.random.default_rng(23)


# ---------------------------------------------------------------------------
# fidelity
# ---------------------------------------------------------------------------

def test_fidelity_identical_and_orthogonal():
    psi = uniform_superposition(3)
    assert fidelity(psi, psi) == pytest.approx(1.0)
    assert fidelity(basis_state(3, 0), basis_state(3, 7)) == 0.0


def test_fidelity_superposition_vs_cat():
    n = 6
    val = fidelity(uniform_superposition(n), ghz_state(n))
    assert val == pytest.approx(2.0 ** (-(n - 1)), abs=1e-15)
    assert val == pytest.approx(0.03125)


def test_fidelity_shape_mismatch():
    with pytest.raises(ValueError):
        fidelity(np.ones(4), np.ones(8))


# ---------------------------------------------------------------------------
# Krylov exponential
# ---------------------------------------------------------------------------

def test_krylov_step_matches_dense_expm():
    dim = 40
    h = RNG.normal(size=(dim, dim))
    h = 0.5 * (h + h.T)
    psi = RNG.normal(size=dim) + 1j * RNG.normal(size=dim)
    psi /= np.linalg.norm(psi)
    for dt in (0.05, 0.4):
        got = _krylov_expm_apply(lambda v: h @ v, psi, dt)
        want = scipy.linalg.expm(-1j * dt * h) @ psi
        assert np.linalg.norm(got - want) < 1e-10
        assert abs(np.linalg.norm(got) - 1.0) < 1e-12


def test_krylov_step_small_dimension_exact():
    h = np.diag([1.0, -1.0])
    psi = np.array([1.0, 1.0]) / np.sqrt(2)
    got = _krylov_expm_apply(lambda v: h @ v, psi, 0.7)
    want = scipy.linalg.expm(-0.7j * h) @ psi
    assert np.linalg.norm(got - want) < 1e-13


# ---------------------------------------------------------------------------
# evolve
# ---------------------------------------------------------------------------

def test_stationary_state_keeps_unit_fidelity():
    n = 4
    h_i, _ = ising_endpoints(n)
    path = InterpolationPath((h_i, h_i), (1.0,))
    psi0 = uniform_superposition(n)
    res = evolve(path, psi0, tau=7.3, target=psi0)
    assert res.fidelity == pytest.approx(1.0, abs=1e-9)
    assert res.norm_drift < 1e-10


def test_sudden_quench_fidelity_matches_overlap():
    n = 8
    path = make_path("ising-linear", n=n)
    psi0 = uniform_superposition(n)
    res = evolve(path, psi0, tau=1e-4, target=ghz_state(n))
    assert res.fidelity == pytest.approx(2.0 ** (-(n - 1)), abs=1e-5)


def test_adiabatic_stepwise_reaches_cat_state():
    n = 6
    path = make_path("ising-stepwise", n=n)
    psi0 = uniform_superposition(n)
    res = evolve(path, psi0, tau=120.0, target=ghz_state(n),
                 track_parity=True, accuracy=1e-5)
    assert res.fidelity >= 0.99
    assert res.norm_drift < 1e-8
    lo, hi = res.parity_range
    assert abs(lo - 1.0) < 1e-8 and abs(hi - 1.0) < 1e-8
    assert res.tau == pytest.approx(120.0)
    assert res.step_count >= path.segment_count


def test_fidelity_grows_with_runtime():
    n = 5
    path = make_path("ising-linear", n=n)
    psi0 = uniform_superposition(n)
    target = ghz_state(n)
    fids = [evolve(path, psi0, tau, target=target, accuracy=1e-5).fidelity
            for tau in (2.0, 20.0, 80.0)]
    assert fids[0] < fids[1] < fids[2]
    assert fids[2] > 0.99


def test_residual_energy_decreases_with_runtime():
    n = 5
    path = make_path("ising-stepwise", n=n)
    h_f = path.operators[-1]
    e0 = lowest_eigenpairs(h_f, 1, want_vectors=False).eigenvalues[0]
    psi0 = uniform_superposition(n)
    residuals = []
    for tau in (3.0, 30.0):
        res = evolve(path, psi0, tau, accuracy=1e-5)
        energy = float(np.real(np.vdot(res.final_state,
                                       h_f.apply(res.final_state))))
        residuals.append(energy - e0)
    assert residuals[1] < residuals[0]
    assert residuals[1] >= -1e-9


def test_evolve_without_target_converges_on_state():
    n = 4
    path = make_path("cluster1d-stepwise", n=n)
    res = evolve(path, uniform_superposition(n), tau=10.0, accuracy=1e-7)
    assert res.fidelity is None
    assert res.norm_drift < 1e-10
    assert isinstance(res, EvolutionResult)


def test_evolve_validation():
    path = make_path("ising-linear", n=3)
    psi0 = uniform_superposition(3)
    with pytest.raises(ValueError):
        evolve(path, psi0, tau=-1.0)
    with pytest.raises(ValueError):
        evolve(path, uniform_superposition(4), tau=1.0)
    with pytest.raises(ValueError):
        evolve(path, 2.0 * psi0, tau=1.0)
    with pytest.raises(ValueError):
        evolve(path, psi0, tau=1.0, target=2.0 * psi0)


# ---------------------------------------------------------------------------
# evolution target
# ---------------------------------------------------------------------------

def test_evolution_target_is_even_cat_for_ising():
    n = 5
    path = make_path("ising-stepwise", n=n)
    target = evolution_target(path)
    assert fidelity(target, ghz_state(n)) == pytest.approx(1.0, abs=1e-10)


def test_evolution_target_without_symmetry_uses_global_ground():
    n = 3
    h_i, _ = ising_endpoints(n)
    h_broken = OperatorSum(n, [PauliString.from_ops(n, {1: "Z"}, -2.0),
                               PauliString.from_ops(n, {2: "X"}, -0.5)])
    path = InterpolationPath((h_i, h_broken), (1.0,))
    target = evolution_target(path)
    w, v = np.linalg.eigh(h_broken.to_dense())
    assert fidelity(target, v[:, 0]) == pytest.approx(1.0, abs=1e-10)


# ---------------------------------------------------------------------------
# runtime scaling
# ---------------------------------------------------------------------------

def test_runtime_for_fidelity_zero_target_takes_first_tau():
    row = runtime_for_fidelity("ising-linear", 4, 0.0, [0.5, 1.0, 2.0])
    assert row.tau_required == 0.5
    assert row.reached
    assert isinstance(row, ScalingRow)


def test_runtime_for_fidelity_unreachable_marker():
    row = runtime_for_fidelity("ising-linear", 5, 0.999, [0.5, 1.0])
    assert not row.reached
    assert row.tau_required is None
    assert len(row.trace) == 2


def test_runtime_for_fidelity_finds_threshold():
    row = runtime_for_fidelity("ising-stepwise", 4, 0.99,
                               [2.0, 8.0, 20.0, 45.0, 90.0])
    assert row.reached
    assert row.tau_required is not None
    # the scan stops at the first grid runtime that reaches the target
    assert row.trace[-1][1] >= 0.99
    for tau, fid in row.trace[:-1]:
        assert fid < 0.99


def test_runtime_grid_validation():
    with pytest.raises(ValueError):
        runtime_for_fidelity("ising-linear", 4, 0.5, [1.0, 1.0])


def test_adiabatic_limit_cluster_build():
    from stepgap.models import chain_lattice, cluster_state
    n = 5
    path = make_path("cluster1d-stepwise", n=n)
    target = cluster_state(chain_lattice(n))
    res = evolve(path, uniform_superposition(n), tau=80.0, target=target,
                 accuracy=1e-6)
    assert res.fidelity >= 0.999


def test_adiabatic_limit_projector_path():
    from stepgap.ec3 import Ec3Instance, solution_superposition
    inst = Ec3Instance(4, ((1, 2, 3), (2, 3, 4)))
    path = make_path("ec3-projector", instance=inst)
    target = solution_superposition(inst, (0, 1), 2)
    res = evolve(path, uniform_superposition(4), tau=60.0, target=target,
                 accuracy=1e-6)
    assert res.fidelity >= 0.999
