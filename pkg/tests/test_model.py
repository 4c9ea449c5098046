import numpy as np
import pytest
import scipy.sparse as sp

from pulsedicke import (
    DickeParams,
    DimensionCapError,
    PulseSchedule,
    build_basis,
    ground_state,
    hamiltonian,
    operators,
    parity_operator,
    pulse_value,
)
from pulsedicke.observables import entanglement_entropy

from oracles import dicke_isometry, full_space_hamiltonian


def test_params_validation():
    with pytest.raises(ValueError):
        DickeParams(N=0)
    with pytest.raises(ValueError):
        DickeParams(N=3, epsilon=0.0)
    with pytest.raises(ValueError):
        DickeParams(N=3, omega=-1.0)
    with pytest.raises(ValueError):
        DickeParams(N=3, n_max=0)


def test_basis_dimensions():
    assert build_basis(DickeParams(N=1, n_max=1)).dimension == 4
    assert build_basis(DickeParams(N=7, n_max=31)).dimension == 256


def test_basis_index_ordering():
    basis = build_basis(DickeParams(N=3, n_max=2))
    assert basis.index(-1.5, 0) == 0
    assert basis.index(1.5, 2) == 11
    assert basis.unindex(0) == (-1.5, 0)
    assert basis.unindex(11) == (1.5, 2)
    # bijective over the whole space
    seen = {basis.index(m, n) for m in basis.m_values for n in basis.n_values}
    assert seen == set(range(basis.dimension))


def test_basis_dimension_cap():
    with pytest.raises(DimensionCapError):
        build_basis(DickeParams(N=2000, n_max=2000))


def test_pulse_values():
    sched = PulseSchedule(lambda_max=1.0, tau=64.0)
    assert pulse_value(sched, 0.0) == 0.0
    assert pulse_value(sched, 32.0) == 1.0
    assert pulse_value(sched, 48.0) == pytest.approx(0.5)
    assert sched.upsilon == pytest.approx(2.0 / 64.0)
    with pytest.raises(ValueError):
        pulse_value(sched, -0.1)
    with pytest.raises(ValueError):
        pulse_value(sched, 64.1)


def test_pulse_symmetry_and_linearity():
    sched = PulseSchedule.from_log2_velocity(1.0, -3.0)
    ts = np.linspace(0.0, sched.tau, 257)
    vals = np.array([sched.value(t) for t in ts])
    # symmetric about tau/2
    assert np.allclose(vals, vals[::-1], atol=1e-12)
    # piecewise linear with slope +-upsilon
    dv = np.diff(vals) / np.diff(ts)
    assert np.allclose(np.abs(dv), sched.upsilon, atol=1e-12)
    # continuous across the apex
    assert sched.value(sched.tau / 2) == pytest.approx(sched.lambda_max)


def test_pulse_from_velocity_consistency():
    sched = PulseSchedule.from_velocity(0.8, 0.05)
    assert sched.tau == pytest.approx(2 * 0.8 / 0.05)
    with pytest.raises(ValueError):
        PulseSchedule(lambda_max=1.0, tau=0.0)


def test_hamiltonian_hermitian():
    params = DickeParams(N=5, n_max=12)
    basis = build_basis(params)
    for lam in (0.0, 0.3, 1.0):
        h = hamiltonian(params, basis, lam)
        assert abs(h - h.conj().T).max() == 0.0


def test_hamiltonian_decoupled_ground_state():
    params = DickeParams(N=6, n_max=8, epsilon=1.0, omega=1.0)
    basis = build_basis(params)
    energy, state, gap = ground_state(params, basis, 0.0)
    assert energy == pytest.approx(-params.N / 2.0, abs=1e-12)
    assert gap == pytest.approx(1.0, abs=1e-12)
    k = np.argmax(np.abs(state.amplitudes))
    assert k == basis.index(-3.0, 0)
    assert state.amplitudes[k] == pytest.approx(1.0)


def test_spectrum_matches_brute_force_symmetric_sector():
    # collective H(lam) == V^dag H_full(lam) V with the Dicke isometry
    for N in (2, 3):
        params = DickeParams(N=N, n_max=6, epsilon=1.0, omega=1.0)
        basis = build_basis(params)
        V = dicke_isometry(N, params.n_max)
        for lam in (0.3, 0.9):
            h_col = hamiltonian(params, basis, lam).toarray()
            h_sym = V.T @ full_space_hamiltonian(N, params.n_max, lam) @ V
            w_col = np.linalg.eigvalsh(h_col)
            w_sym = np.linalg.eigvalsh(h_sym)
            assert np.allclose(w_col, w_sym, atol=1e-10)


def test_parity_operator():
    params = DickeParams(N=5, n_max=20)
    basis = build_basis(params)
    pi = parity_operator(params, basis)
    eye = sp.identity(basis.dimension)
    assert abs(pi @ pi - eye).max() == 0.0
    # initial |m=-j, n=0> has parity +1
    assert pi.diagonal()[basis.index(-2.5, 0)] == 1.0
    h = hamiltonian(params, basis, 0.7)
    assert abs(h @ pi - pi @ h).max() < 1e-12


def test_parity_commutes_across_couplings():
    params = DickeParams(N=4, n_max=10)
    basis = build_basis(params)
    pi = parity_operator(params, basis)
    for lam in np.linspace(0.0, 1.0, 5):
        h = hamiltonian(params, basis, lam)
        comm = abs(h @ pi - pi @ h).max()
        hnorm = abs(h).max()
        assert comm <= 1e-10 * max(hnorm, 1.0)


def test_spectrum_truncation_convergence():
    # 10 lowest eigenvalues shift by < 1e-8 relative under n_max -> n_max+8
    params = DickeParams(N=5, n_max=28)
    w1 = np.linalg.eigvalsh(
        hamiltonian(params, build_basis(params), 1.0).toarray())[:10]
    params2 = params.with_n_max(36)
    w2 = np.linalg.eigvalsh(
        hamiltonian(params2, build_basis(params2), 1.0).toarray())[:10]
    assert np.max(np.abs(w1 - w2) / np.maximum(np.abs(w2), 1e-12)) < 1e-8


def test_ground_state_entropy_rises_near_critical_coupling():
    # epsilon = omega = 1 puts the boundary at lam_c = 0.5
    params = DickeParams(N=8, n_max=36)
    basis = build_basis(params)
    entropies = {}
    for lam in (0.15, 0.25, 0.45, 0.55):
        _, state, _ = ground_state(params, basis, lam)
        entropies[lam] = entanglement_entropy(state)
    assert entropies[0.55] - entropies[0.45] > 3 * (entropies[0.25] - entropies[0.15])


def test_ground_state_deep_phase_entropy_one_bit():
    params = DickeParams(N=12, n_max=44)
    basis = build_basis(params)
    _, state, _ = ground_state(params, basis, 1.0)
    assert abs(entanglement_entropy(state) - 1.0) < 0.1


def test_ground_state_dense_cap():
    params = DickeParams(N=80, n_max=80)
    basis = build_basis(params)
    with pytest.raises(DimensionCapError):
        ground_state(params, basis, 0.5)


def test_ground_state_phase_convention():
    params = DickeParams(N=4, n_max=16)
    basis = build_basis(params)
    _, state, _ = ground_state(params, basis, 0.8)
    k = np.argmax(np.abs(state.amplitudes))
    assert state.amplitudes[k].imag == pytest.approx(0.0, abs=1e-14)
    assert state.amplitudes[k].real > 0
