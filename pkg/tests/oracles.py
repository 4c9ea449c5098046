"""Independent reference constructions used as test oracles.

Everything here is deliberately built by a different route than the
package: the full 2^N tensor-product Hamiltonian from single-qubit Pauli
matrices, Dicke-state isometries assembled from binomial symmetrization,
and dense piecewise-constant exact-exponential propagators.
"""
import math

import numpy as np

SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def _kron_chain(mats):
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def _site_operator(N, i, op):
    return _kron_chain([op if k == i else np.eye(2) for k in range(N)])


def full_space_hamiltonian(N, n_max, lam, epsilon=1.0, omega=1.0):
    """2^N x Fock Hamiltonian with per-qubit coupling (lam/sqrt(N)) sigma_x (a+adag),
    whose symmetric sector equals the collective form (2 lam/sqrt(N)) Jx (a+adag)."""
    nb = n_max + 1
    a = np.diag(np.sqrt(np.arange(1, nb)), 1)
    x = a + a.T
    eye_b = np.eye(nb)
    eye_s = np.eye(2 ** N)
    h = omega * np.kron(eye_s, a.T @ a).astype(complex)
    for i in range(N):
        h += (epsilon / 2.0) * np.kron(_site_operator(N, i, SZ), eye_b)
        h += (lam / math.sqrt(N)) * np.kron(_site_operator(N, i, SX), x)
    return h


def dicke_isometry(N, n_max):
    """Columns map collective |j=N/2, m> x |n> into the 2^N x Fock space.

    Spin convention: sigma_z|down> = -|down>, bit 1 = up; |j, m=-j+k> is the
    normalized sum over all bitstrings with k up-spins.
    """
    nb = n_max + 1
    V = np.zeros((2 ** N * nb, (N + 1) * nb))
    for k in range(N + 1):
        norm = 1.0 / math.sqrt(math.comb(N, k))
        for bits in range(2 ** N):
            if bin(bits).count("1") != k:
                continue
            for n in range(nb):
                V[bits * nb + n, k * nb + n] = norm
    return V


def dense_exponential_propagate(h_of_lam, schedule, psi0, checkpoint_times, step):
    """Piecewise-constant-lam exact-exponential stepping (lam frozen at each
    step midpoint).  ``h_of_lam`` maps a coupling value to a dense Hamiltonian.
    Returns the list of states at the checkpoint times."""
    psi = psi0.astype(complex).copy()
    t = 0.0
    out = []
    for tb in checkpoint_times:
        n_steps = max(1, int(round((tb - t) / step)))
        h = (tb - t) / n_steps
        for s in range(n_steps):
            tm = t + (s + 0.5) * h
            lam = schedule.value(min(tm, schedule.tau), extend=True)
            w, V = np.linalg.eigh(h_of_lam(lam))
            psi = V @ (np.exp(-1j * h * w) * (V.conj().T @ psi))
        t = tb
        out.append(psi.copy())
    return out


def schmidt_coefficients(psi_matrix):
    """Singular values of the (spin, boson) amplitude matrix."""
    return np.linalg.svd(psi_matrix, compute_uv=False)


def pure_negativity_from_schmidt(c):
    """N = sum_{i<k} c_i c_k = ((sum c)^2 - 1)/2 for a normalized pure state."""
    s = float(np.sum(c))
    return 0.5 * (s * s - float(np.sum(np.asarray(c) ** 2)))
