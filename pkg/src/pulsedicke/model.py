"""Collective-basis Dicke model: parameters, pulse, basis, and operators.

Conventions
-----------
- Collective spin j = N/2 with J_alpha = (1/2) sum_i sigma_alpha^i; the
  symmetric sector |j, m> (m = -j..+j) tensored with a truncated Fock
  space |n> (n = 0..n_max) spans the working Hilbert space.
- Flat indexing is m-major, n-minor: index(m, n) = i_m*(n_max+1) + n with
  i_m = 0 at m = -j.
- The Hamiltonian at coupling lam is

      H(lam) = epsilon*J_z + omega*a^dag a + (2*lam/sqrt(N)) * J_x (a + a^dag)

  which under mean field puts the phase boundary at lam_c = sqrt(epsilon*omega)/2.
- Operators are scipy.sparse CSR matrices (the Hamiltonian touches at most
  5 bands of the product basis); dense conversion is reserved for small-D
  diagnostics such as the ground-state solver.

The triangular pulse lam(t) ramps linearly 0 -> lambda_max -> 0 over a
round-trip time tau; the ramping velocity is upsilon = |dlam/dt| =
2*lambda_max/tau.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .errors import DimensionCapError
from .states import PureState

# Hard ceiling on the flat product-basis dimension for desk-scale runs.
MAX_BASIS_DIMENSION = 1_048_576
# Default cap for dense eigendecomposition in ground_state.
DENSE_EIG_CAP = 4096


@dataclass(frozen=True)
class DickeParams:
    """Physical parameters: N qubits, splitting epsilon, boson quantum omega,
    Fock truncation n_max."""

    N: int
    epsilon: float = 1.0
    omega: float = 1.0
    n_max: int = 32

    def __post_init__(self):
        if not (isinstance(self.N, (int, np.integer)) and self.N >= 1):
            raise ValueError(f"N must be a positive integer, got {self.N}")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.omega <= 0:
            raise ValueError(f"omega must be > 0, got {self.omega}")
        if not (isinstance(self.n_max, (int, np.integer)) and self.n_max >= 1):
            raise ValueError(f"n_max must be an integer >= 1, got {self.n_max}")

    @property
    def j(self) -> float:
        return self.N / 2.0

    @property
    def dimension(self) -> int:
        return (self.N + 1) * (self.n_max + 1)

    def with_n_max(self, n_max: int) -> "DickeParams":
        return DickeParams(self.N, self.epsilon, self.omega, n_max)


@dataclass(frozen=True)
class PulseSchedule:
    """Triangular coupling profile lam(t) with round-trip time tau.

    lam(0) = lam(tau) = 0 and lam(tau/2) = lambda_max; the slope magnitude
    upsilon = 2*lambda_max/tau is constant on each leg.  lambda_max = 0 is
    allowed as the degenerate (always-off) pulse.
    """

    lambda_max: float
    tau: float
    shape: str = "triangular"

    def __post_init__(self):
        if self.lambda_max < 0:
            raise ValueError(f"lambda_max must be >= 0, got {self.lambda_max}")
        if self.tau <= 0:
            raise ValueError(f"tau must be > 0, got {self.tau}")
        if self.shape != "triangular":
            raise ValueError(f"unsupported pulse shape {self.shape!r}")

    @classmethod
    def from_velocity(cls, lambda_max: float, upsilon: float) -> "PulseSchedule":
        if upsilon <= 0:
            raise ValueError(f"upsilon must be > 0, got {upsilon}")
        return cls(lambda_max, 2.0 * lambda_max / upsilon)

    @classmethod
    def from_log2_velocity(cls, lambda_max: float, log2_upsilon: float) -> "PulseSchedule":
        return cls.from_velocity(lambda_max, 2.0 ** log2_upsilon)

    @property
    def upsilon(self) -> float:
        return 2.0 * self.lambda_max / self.tau

    def value(self, t: float, extend: bool = False) -> float:
        """lam(t).  With extend=True, t > tau returns 0 (post-pulse)."""
        if t < 0 or (t > self.tau and not extend):
            raise ValueError(f"t={t} outside the pulse interval [0, {self.tau}]")
        if t > self.tau:
            return 0.0
        u = self.upsilon
        return u * t if t <= self.tau / 2 else u * (self.tau - t)

    def slope(self, t: float) -> float:
        """dlam/dt on the leg containing t (0 beyond the pulse)."""
        if t > self.tau:
            return 0.0
        return self.upsilon if t < self.tau / 2 else -self.upsilon


def pulse_value(schedule: PulseSchedule, t: float) -> float:
    """Triangular pulse value lam(t); range error outside [0, tau]."""
    return schedule.value(t)


@dataclass(frozen=True)
class BasisDescriptor:
    """Flat (m, n) product-basis bookkeeping for the collective sector."""

    j: float
    m_values: tuple
    n_values: tuple

    @property
    def dimension(self) -> int:
        return len(self.m_values) * len(self.n_values)

    @property
    def n_max(self) -> int:
        return len(self.n_values) - 1

    @property
    def N(self) -> int:
        return len(self.m_values) - 1

    def index(self, m: float, n: int) -> int:
        im = int(round(m + self.j))
        if not (0 <= im <= self.N) or abs(m + self.j - im) > 1e-12:
            raise ValueError(f"m={m} not in the spin-{self.j} ladder")
        if not (0 <= n <= self.n_max):
            raise ValueError(f"n={n} outside 0..{self.n_max}")
        return im * len(self.n_values) + n

    def unindex(self, i: int) -> tuple:
        nm = len(self.n_values)
        return (self.m_values[i // nm], self.n_values[i % nm])


def build_basis(params: DickeParams, max_dim: int = MAX_BASIS_DIMENSION) -> BasisDescriptor:
    """Collective basis |j=N/2, m> x |n> with m-major, n-minor flat ordering."""
    dim = params.dimension
    if dim > max_dim:
        raise DimensionCapError(
            f"basis dimension {dim} exceeds the cap {max_dim}; "
            f"reduce N or n_max for a desk-scale run"
        )
    j = params.j
    ms = tuple(-j + k for k in range(params.N + 1))
    ns = tuple(range(params.n_max + 1))
    return BasisDescriptor(j=j, m_values=ms, n_values=ns)


class OperatorTable:
    """Sparse collective operators plus kernel-ready aligned CSR arrays.

    The Hamiltonian family H(lam) = H0 + lam*H1 shares one CSR sparsity
    pattern (diagonal union coupling bands).  ``d0``, ``d1`` and ``dC``
    are the pattern-aligned data vectors of H0, H1 and i[H0, H1]; the
    latter feeds the 4th-order Magnus commutator term in the propagator.
    """

    def __init__(self, params: DickeParams, basis: BasisDescriptor):
        self.params = params
        self.basis = basis
        N, n_max = params.N, params.n_max
        j = params.j
        nm = n_max + 1
        D = basis.dimension

        ms = np.asarray(basis.m_values, dtype=float)
        ns = np.arange(nm, dtype=float)
        self.h0_diag = np.add.outer(params.epsilon * ms, params.omega * ns).ravel()

        # coupling bands of H1 = (2/sqrt(N)) Jx (a + adag)
        rows, cols, vals = [], [], []
        pref = 2.0 / math.sqrt(N)
        for im, m in enumerate(ms):
            jp = 0.5 * math.sqrt(max(j * (j + 1) - m * (m + 1), 0.0))  # <m+1|Jx|m>
            jm = 0.5 * math.sqrt(max(j * (j + 1) - m * (m - 1), 0.0))  # <m-1|Jx|m>
            for dm, jfac in ((1, jp), (-1, jm)):
                im2 = im + dm
                if not (0 <= im2 <= N) or jfac == 0.0:
                    continue
                for n in range(nm):
                    for dn in (1, -1):
                        n2 = n + dn
                        if not (0 <= n2 <= n_max):
                            continue
                        rows.append(im2 * nm + n2)
                        cols.append(im * nm + n)
                        vals.append(pref * jfac * math.sqrt(max(n, n2)))
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.complex128)

        # union pattern: diagonal first, then bands; stable manual CSR
        rows_u = np.concatenate([np.arange(D, dtype=np.int64), rows])
        cols_u = np.concatenate([np.arange(D, dtype=np.int64), cols])
        d0 = np.concatenate([self.h0_diag.astype(np.complex128), np.zeros_like(vals)])
        d1 = np.concatenate([np.zeros(D, dtype=np.complex128), vals])
        # i[H0, H1]_ab = i (h0_a - h0_b) H1_ab  (H0 diagonal)
        dC = np.concatenate(
            [np.zeros(D, dtype=np.complex128),
             1j * (self.h0_diag[rows] - self.h0_diag[cols]) * vals]
        )
        diag_mark = np.concatenate([np.ones(D), np.zeros(len(vals))])
        order = np.lexsort((cols_u, rows_u))
        self.indices = cols_u[order]
        self.d0 = d0[order]
        self.d1 = d1[order]
        self.dC = dC[order]
        self.diag_mark = diag_mark[order]
        self.indptr = np.searchsorted(rows_u[order], np.arange(D + 1)).astype(np.int64)

    @property
    def dimension(self) -> int:
        return self.basis.dimension

    def _csr(self, data) -> sp.csr_matrix:
        m = sp.csr_matrix((data.copy(), self.indices.copy(), self.indptr.copy()),
                          shape=(self.dimension, self.dimension))
        m.eliminate_zeros()
        return m

    @cached_property
    def h0(self) -> sp.csr_matrix:
        return self._csr(self.d0)

    @cached_property
    def h1(self) -> sp.csr_matrix:
        return self._csr(self.d1)

    def hamiltonian(self, lam: float) -> sp.csr_matrix:
        if lam < 0:
            raise ValueError(f"coupling lam must be >= 0, got {lam}")
        return self._csr(self.d0 + lam * self.d1)

    # --- factor-space operators -------------------------------------------
    @cached_property
    def _spin_matrices(self):
        j = self.params.j
        m = np.asarray(self.basis.m_values, dtype=float)
        jz = np.diag(m)
        up = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))  # <m+1|J+|m>
        jplus = np.diag(up, -1)
        return jz, jplus

    @cached_property
    def jz(self) -> sp.csr_matrix:
        jz, _ = self._spin_matrices
        return sp.csr_matrix(sp.kron(jz, sp.identity(self.params.n_max + 1)))

    @cached_property
    def jplus(self) -> sp.csr_matrix:
        _, jp = self._spin_matrices
        return sp.csr_matrix(sp.kron(jp, sp.identity(self.params.n_max + 1)))

    @cached_property
    def jminus(self) -> sp.csr_matrix:
        return sp.csr_matrix(self.jplus.conj().T)

    @cached_property
    def jx(self) -> sp.csr_matrix:
        return sp.csr_matrix(0.5 * (self.jplus + self.jminus))

    @cached_property
    def a(self) -> sp.csr_matrix:
        n_max = self.params.n_max
        ab = sp.diags(np.sqrt(np.arange(1, n_max + 1)), 1)
        return sp.csr_matrix(sp.kron(sp.identity(self.params.N + 1), ab))

    @cached_property
    def adag(self) -> sp.csr_matrix:
        return sp.csr_matrix(self.a.conj().T)

    @cached_property
    def number(self) -> sp.csr_matrix:
        nb = sp.diags(np.arange(self.params.n_max + 1, dtype=float))
        return sp.csr_matrix(sp.kron(sp.identity(self.params.N + 1), nb))

    @cached_property
    def parity(self) -> sp.csr_matrix:
        return parity_operator(self.params, self.basis)

    @cached_property
    def parity_diag(self) -> np.ndarray:
        N, nm = self.params.N, self.params.n_max + 1
        k = np.add.outer(np.arange(N + 1), np.arange(nm)).ravel()  # (m+j) + n
        return np.where(k % 2 == 0, 1.0, -1.0)


def operators(params: DickeParams, basis: BasisDescriptor | None = None) -> OperatorTable:
    """Assemble the full operator table for the collective basis."""
    if basis is None:
        basis = build_basis(params)
    return OperatorTable(params, basis)


def hamiltonian(params: DickeParams, basis: BasisDescriptor, lam: float) -> sp.csr_matrix:
    """H(lam) = epsilon*Jz + omega*n + (2 lam/sqrt(N)) Jx (a + adag), sparse."""
    return OperatorTable(params, basis).hamiltonian(lam)


def parity_operator(params: DickeParams, basis: BasisDescriptor) -> sp.csr_matrix:
    """Conserved Z2 parity Pi = diag((-1)^(n + m + j)); Pi^2 = I, [H, Pi] = 0."""
    N, nm = params.N, params.n_max + 1
    k = np.add.outer(np.arange(N + 1), np.arange(nm)).ravel()
    return sp.csr_matrix(sp.diags(np.where(k % 2 == 0, 1.0, -1.0)))


def ground_state(params: DickeParams, basis: BasisDescriptor, lam: float,
                 dense_cap: int = DENSE_EIG_CAP):
    """Lowest eigenpair of H(lam) and the gap to the first excited state.

    The eigenvector's global phase is fixed by making its largest-magnitude
    amplitude real and positive.  Dense eigendecomposition only; dimensions
    beyond ``dense_cap`` raise.
    """
    D = basis.dimension
    if D > dense_cap:
        raise DimensionCapError(
            f"dimension {D} exceeds the dense eigensolver cap {dense_cap}; "
            f"an iterative mode is not provided at desk scale"
        )
    h = OperatorTable(params, basis).hamiltonian(lam).toarray()
    w, v = np.linalg.eigh(h)
    vec = v[:, 0]
    k = int(np.argmax(np.abs(vec)))
    phase = vec[k] / abs(vec[k])
    vec = vec / phase
    state = PureState(basis, vec, t=0.0)
    return float(w[0]), state, float(w[1] - w[0])


def coherent_state(n_max: int, alpha: complex) -> np.ndarray:
    """Truncated coherent-state amplitudes <n|alpha>, renormalized."""
    n = np.arange(n_max + 1)
    log_fact = np.concatenate([[0.0], np.cumsum(np.log(np.arange(1, n_max + 1)))])
    if alpha == 0:
        amps = np.zeros(n_max + 1, dtype=np.complex128)
        amps[0] = 1.0
        return amps
    amps = np.exp(n * np.log(complex(alpha)) - 0.5 * log_fact - 0.5 * abs(alpha) ** 2)
    return amps / np.linalg.norm(amps)


def product_state(basis: BasisDescriptor, spin_amps, boson_amps, t: float = 0.0) -> PureState:
    """Pure product state from factor amplitudes (each normalized here)."""
    s = np.asarray(spin_amps, dtype=np.complex128)
    b = np.asarray(boson_amps, dtype=np.complex128)
    if s.shape != (basis.N + 1,) or b.shape != (basis.n_max + 1,):
        raise ValueError("factor amplitude lengths do not match the basis")
    s = s / np.linalg.norm(s)
    b = b / np.linalg.norm(b)
    return PureState(basis, np.kron(s, b), t=t)
