"""State containers shared by the closed- and open-system propagators.

A pure state is a complex amplitude vector over the flat (m, n) product
basis defined by a ``BasisDescriptor``; a density matrix is a Hermitian,
unit-trace operator either on the full product space or on one factor
(``space`` is 'full', 'spin' or 'boson').
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class PureState:
    """Normalized amplitudes over the (m, n) product basis at time ``t``."""

    basis: "BasisDescriptor"  # noqa: F821 - forward ref, defined in model
    amplitudes: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.amplitudes = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (self.basis.dimension,):
            raise ValueError(
                f"amplitude vector has shape {self.amplitudes.shape}, "
                f"basis dimension is {self.basis.dimension}"
            )

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "PureState":
        return PureState(self.basis, self.amplitudes / self.norm, self.t)

    def as_matrix(self) -> np.ndarray:
        """Amplitudes reshaped to (spin, boson) = (N+1, n_max+1)."""
        b = self.basis
        return self.amplitudes.reshape(len(b.m_values), len(b.n_values))

    def density_matrix(self) -> "DensityMatrix":
        a = self.amplitudes
        return DensityMatrix(np.outer(a, a.conj()), t=self.t, basis=self.basis)

    def copy(self) -> "PureState":
        return PureState(self.basis, self.amplitudes.copy(), self.t)


@dataclass
class DensityMatrix:
    """Hermitian unit-trace operator on the full space or one subsystem."""

    matrix: np.ndarray
    t: float = 0.0
    basis: "BasisDescriptor | None" = None  # noqa: F821
    space: str = "full"  # 'full' | 'spin' | 'boson'

    def __post_init__(self):
        self.matrix = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        if self.matrix.ndim != 2 or self.matrix.shape[0] != self.matrix.shape[1]:
            raise ValueError(f"density matrix must be square, got {self.matrix.shape}")
        if self.space not in ("full", "spin", "boson"):
            raise ValueError(f"unknown subsystem tag {self.space!r}")

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def hermiticity_defect(self) -> float:
        return float(np.abs(self.matrix - self.matrix.conj().T).max())

    def min_eigenvalue(self) -> float:
        h = 0.5 * (self.matrix + self.matrix.conj().T)
        return float(np.linalg.eigvalsh(h)[0])

    def validate(self, herm_tol=1e-10, trace_tol=1e-9, pos_tol=1e-8):
        """Check the Hermiticity / trace / positivity invariants."""
        if self.hermiticity_defect() > herm_tol:
            raise ValueError(f"density matrix not Hermitian within {herm_tol}")
        if abs(self.trace() - 1.0) > trace_tol:
            raise ValueError(f"trace {self.trace()} deviates from 1 beyond {trace_tol}")
        if self.min_eigenvalue() < -pos_tol:
            raise ValueError(f"minimum eigenvalue {self.min_eigenvalue()} below -{pos_tol}")
        return self

    def copy(self) -> "DensityMatrix":
        return DensityMatrix(self.matrix.copy(), self.t, self.basis, self.space)
