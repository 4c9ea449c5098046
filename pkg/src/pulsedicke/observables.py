"""Scalar diagnostics: reductions, entropy, negativity, expectations.

All entropies and logarithms are base 2, so the deep-coupling ground-state
asymptote reads as exactly 1 bit.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .states import DensityMatrix, PureState

EIG_CLIP = 1e-8  # reduced-state eigenvalues in [-EIG_CLIP, 0) are clipped to 0


def _factor_dims(state) -> tuple:
    basis = state.basis
    if basis is None:
        raise ValueError("state carries no basis; cannot infer factor dimensions")
    return basis.N + 1, basis.n_max + 1


def reduce(state: PureState | DensityMatrix, keep: str) -> DensityMatrix:
    """Partial trace onto one factor; ``keep`` is 'spin' or 'boson'."""
    if keep not in ("spin", "boson"):
        raise ValueError(f"keep must be 'spin' or 'boson', got {keep!r}")
    if isinstance(state, DensityMatrix) and state.space != "full":
        raise ValueError("reduce expects a state on the full product space")
    ds, db = _factor_dims(state)
    if isinstance(state, PureState):
        A = state.as_matrix()
        rho = A @ A.conj().T if keep == "spin" else A.T @ A.conj()
    else:
        R = state.matrix.reshape(ds, db, ds, db)
        rho = np.einsum("mnpn->mp", R) if keep == "spin" else np.einsum("mnmq->nq", R)
    return DensityMatrix(rho, t=state.t, basis=state.basis, space=keep)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """S = -sum p log2 p over the eigenvalues of rho, in bits."""
    w = np.linalg.eigvalsh(0.5 * (rho.matrix + rho.matrix.conj().T))
    if w[0] < -EIG_CLIP:
        raise ValueError(f"reduced state has eigenvalue {w[0]} < -{EIG_CLIP}")
    w = np.clip(w, 0.0, None)
    w = w[w > 0.0]
    return float(-(w * np.log2(w)).sum())


def entanglement_entropy(state: PureState | DensityMatrix, keep: str = "spin") -> float:
    """Entropy of the reduced state on one factor, in bits."""
    return von_neumann_entropy(reduce(state, keep))


def partial_transpose_spin(rho: DensityMatrix) -> np.ndarray:
    """Partial transpose with respect to the spin (electronic) factor."""
    ds, db = _factor_dims(rho)
    R = rho.matrix.reshape(ds, db, ds, db)
    return np.ascontiguousarray(R.transpose(2, 1, 0, 3)).reshape(ds * db, ds * db)


def negativity(state: PureState | DensityMatrix) -> tuple:
    """(N, logN) across the spin|boson cut.

    N = (||rho^Gamma||_1 - 1)/2 and logN = log2 ||rho^Gamma||_1, where the
    partial transpose acts on the spin factor and ||.||_1 is the trace norm
    (sum of singular values).
    """
    rho = state.density_matrix() if isinstance(state, PureState) else state
    if rho.space != "full":
        raise ValueError("negativity requires a full-space density matrix")
    svals = np.linalg.svd(partial_transpose_spin(rho), compute_uv=False)
    trace_norm = float(svals.sum())
    return max(0.5 * (trace_norm - 1.0), 0.0), max(float(np.log2(trace_norm)), 0.0)


def expectation(op, state: PureState | DensityMatrix) -> complex:
    """<psi|O|psi> or tr(rho O); real part alone for Hermitian O is the
    caller's concern."""
    if isinstance(state, PureState):
        psi = state.amplitudes
        if op.shape[1] != psi.shape[0]:
            raise ValueError(f"operator shape {op.shape} does not match state "
                             f"dimension {psi.shape[0]}")
        return complex(np.vdot(psi, op @ psi))
    rho = state.matrix
    if op.shape[1] != rho.shape[0]:
        raise ValueError(f"operator shape {op.shape} does not match density "
                         f"matrix dimension {rho.shape[0]}")
    prod = op @ rho
    if sp.issparse(prod):
        return complex(prod.diagonal().sum())
    return complex(np.trace(prod))
