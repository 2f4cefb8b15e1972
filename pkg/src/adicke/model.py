"""Anisotropic Dicke model on a truncated Fock x spin basis.

The Hamiltonian couples a single bosonic mode (frequency ``omega``) to a
collective pseudospin of length ``j`` (transition frequency ``Omega``) through
independent rotating-wave (``lambda1``) and counterrotating-wave (``lambda2``)
amplitudes carrying a common phase ``theta``:

    H = omega a'a + Omega Jz
        + lambda1/sqrt(2j) (e^{i theta} a' J- + e^{-i theta} a J+)
        + lambda2/sqrt(2j) (e^{i theta} a' J+ + e^{-i theta} a J-)

Basis ordering is photon-major: |n> x |j, m> with n = 0..n_max outer and
m = -j..j inner, so index = n * (2j+1) + (m+j).  The Z2 parity
exp{i pi (a'a + Jz + j)} is diagonal in this basis and exactly conserved,
so the Hamiltonian splits into two parity blocks even after truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from .errors import TruncationError

#: Parameters with respect to which the Hamiltonian can be differentiated.
PARAMETER_LABELS = ("omega", "Omega", "lambda1", "lambda2", "theta")

#: Matrices at or below this dimension are stored dense.
DENSE_STORAGE_LIMIT = 2000

#: Hard guard against runaway basis sizes.
DEFAULT_MAX_DIM = 250_000

_SECTORS = ("positive", "negative", "full")


@dataclass(frozen=True)
class ModelParams:
    """One physical parameter point (omega, Omega, lambda1, lambda2, theta, j)."""

    omega: float = 1.0
    Omega: float = 1.0
    lambda1: float = 0.0
    lambda2: float = 0.0
    theta: float = 0.0
    j: float = 0.5

    def __post_init__(self):
        if self.omega <= 0 or self.Omega <= 0:
            raise ValueError("omega and Omega must be positive")
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("coupling amplitudes must be non-negative")
        two_j = 2 * self.j
        if self.j <= 0 or abs(two_j - round(two_j)) > 1e-9:
            raise ValueError(f"j must be a positive half-integer, got {self.j}")

    @property
    def g(self) -> float:
        """Dimensionless coupling (lambda1 + lambda2)/sqrt(omega * Omega); critical at 1."""
        return (self.lambda1 + self.lambda2) / math.sqrt(self.omega * self.Omega)

    @property
    def gamma(self) -> float:
        """Coupling ratio lambda1/lambda2; +inf when lambda2 = 0, 1 when both vanish."""
        if self.lambda2 == 0.0:
            return math.inf if self.lambda1 > 0 else 1.0
        return self.lambda1 / self.lambda2

    @property
    def eta(self) -> float:
        """Frequency ratio Omega/omega."""
        return self.Omega / self.omega

    @property
    def spin_dim(self) -> int:
        return int(round(2 * self.j)) + 1

    @classmethod
    def from_ratios(cls, g: float, gamma: float = 1.0, eta: float = 1.0,
                    omega: float = 1.0, theta: float = 0.0, j: float = 0.5) -> "ModelParams":
        """Build a parameter point from the dimensionless ratios (g, gamma, eta)."""
        if g < 0:
            raise ValueError("g must be non-negative")
        Omega = eta * omega
        total = g * math.sqrt(omega * Omega)
        if math.isinf(gamma):
            lam1, lam2 = total, 0.0
        else:
            if gamma <= 0:
                raise ValueError("gamma must be positive (or inf)")
            lam1 = total * gamma / (1.0 + gamma)
            lam2 = total / (1.0 + gamma)
        return cls(omega=omega, Omega=Omega, lambda1=lam1, lambda2=lam2, theta=theta, j=j)

    def shifted(self, which: str, delta: float) -> "ModelParams":
        """Return a copy with one primary parameter shifted by ``delta``."""
        if which not in PARAMETER_LABELS:
            raise ValueError(f"unknown parameter {which!r}")
        return replace(self, **{which: getattr(self, which) + delta})


def derived_couplings(p: ModelParams) -> tuple[float, float, float]:
    """Return the dimensionless ratios (g, gamma, eta) of a parameter point."""
    return p.g, p.gamma, p.eta


@dataclass(frozen=True)
class Truncation:
    """Basis bookkeeping: Fock cutoff, spin dimension and parity sector."""

    n_max: int
    spin_dim: int
    parity_sector: str = "positive"

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1")
        if self.spin_dim < 1:
            raise ValueError("spin_dim must be at least 1")
        if self.parity_sector not in _SECTORS:
            raise ValueError(f"parity_sector must be one of {_SECTORS}")

    @classmethod
    def for_spin(cls, n_max: int, j: float, parity_sector: str = "positive") -> "Truncation":
        return cls(n_max=n_max, spin_dim=int(round(2 * j)) + 1, parity_sector=parity_sector)

    @property
    def dim(self) -> int:
        """Full product-basis dimension (n_max + 1)(2j + 1)."""
        return (self.n_max + 1) * self.spin_dim


@dataclass(frozen=True)
class OperatorMatrix:
    """A complex matrix together with a tag naming the basis it lives on."""

    mat: object  # numpy.ndarray or scipy.sparse array
    basis: str = ""

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.mat)

    def toarray(self) -> np.ndarray:
        if self.is_sparse:
            return self.mat.toarray()
        return np.asarray(self.mat)

    def hermiticity_defect(self) -> float:
        """Entrywise max |M - M^dagger|."""
        diff = self.mat - _adjoint(self.mat)
        if sp.issparse(diff):
            return float(np.max(np.abs(diff.data))) if diff.nnz else 0.0
        return float(np.max(np.abs(diff))) if diff.size else 0.0

    @staticmethod
    def wrap(mat, basis: str = "") -> "OperatorMatrix":
        """Wrap a matrix, densifying it below the sparse-storage threshold."""
        if sp.issparse(mat) and mat.shape[0] <= DENSE_STORAGE_LIMIT:
            mat = mat.toarray()
        elif not sp.issparse(mat):
            mat = np.asarray(mat)
            if mat.shape[0] > DENSE_STORAGE_LIMIT:
                mat = sp.csr_array(mat)
        return OperatorMatrix(mat=mat, basis=basis)


def _adjoint(mat):
    if sp.issparse(mat):
        return mat.conj().T
    return np.asarray(mat).conj().T


# ---------------------------------------------------------------------------
# elementary operators


def boson_operators(n_max: int) -> tuple[OperatorMatrix, OperatorMatrix, OperatorMatrix]:
    """Truncated ladder matrices (a, a_dag, n) on Fock states |0..n_max>.

    The commutator [a, a_dag] equals the identity except for the single corner
    entry (n_max, n_max); that truncation defect is accepted and controlled by
    convergence checks rather than patched.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    dim = n_max + 1
    a = np.zeros((dim, dim))
    a[np.arange(n_max), np.arange(1, dim)] = np.sqrt(np.arange(1, dim))
    n_op = np.diag(np.arange(dim, dtype=float))
    tag = f"fock:{n_max}"
    return (OperatorMatrix(a, tag), OperatorMatrix(a.T.copy(), tag), OperatorMatrix(n_op, tag))


def spin_operators(j: float) -> tuple[OperatorMatrix, OperatorMatrix, OperatorMatrix]:
    """Collective spin matrices (J+, J-, Jz) on |j, m>, m = -j..j ascending."""
    two_j = 2 * j
    if j <= 0 or abs(two_j - round(two_j)) > 1e-9:
        raise ValueError(f"j must be a positive half-integer, got {j}")
    dim = int(round(two_j)) + 1
    m = -j + np.arange(dim)
    jz = np.diag(m)
    amp = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))  # <m+1|J+|m>
    jp = np.zeros((dim, dim))
    jp[np.arange(1, dim), np.arange(dim - 1)] = amp
    tag = f"spin:{j}"
    return (OperatorMatrix(jp, tag), OperatorMatrix(jp.T.copy(), tag), OperatorMatrix(jz, tag))


# ---------------------------------------------------------------------------
# full Hamiltonian and its pieces


def _check_truncation(p: ModelParams, t: Truncation):
    if t.spin_dim != p.spin_dim:
        raise ValueError(f"truncation spin_dim {t.spin_dim} does not match 2j+1 = {p.spin_dim}")


def _product_pieces(p: ModelParams, t: Truncation):
    """Sparse pieces of the product-basis Hamiltonian.

    Returns (number, jz_full, rw, cr) where rw = e^{i theta} a'J- + h.c. and
    cr = e^{i theta} a'J+ + h.c., both already carrying the 1/sqrt(2j)
    normalization of the collective coupling.
    """
    _, adag, n_op = (op.mat for op in boson_operators(t.n_max))
    jp, jm, jz = (op.mat for op in spin_operators(p.j))
    eye_b = sp.identity(t.n_max + 1, format="csr")
    eye_s = sp.identity(t.spin_dim, format="csr")

    number = sp.kron(sp.csr_array(n_op), eye_s, format="csr")
    jz_full = sp.kron(eye_b, sp.csr_array(jz), format="csr")

    phase = np.exp(1j * p.theta)
    norm = 1.0 / math.sqrt(2 * p.j)
    up_minus = sp.kron(sp.csr_array(adag), sp.csr_array(jm), format="csr")
    up_plus = sp.kron(sp.csr_array(adag), sp.csr_array(jp), format="csr")
    rw = norm * (phase * up_minus + np.conj(phase) * up_minus.conj().T)
    cr = norm * (phase * up_plus + np.conj(phase) * up_plus.conj().T)
    return number, jz_full, rw, cr


def parity_labels(t: Truncation) -> np.ndarray:
    """Diagonal of exp{i pi (a'a + Jz + j)}: +1 / -1 per product-basis state."""
    n = np.arange(t.n_max + 1)
    m_shifted = np.arange(t.spin_dim)  # m + j = 0..2j
    return np.where((np.add.outer(n, m_shifted) % 2) == 0, 1.0, -1.0).ravel()


def parity_operator(t: Truncation) -> OperatorMatrix:
    """The Z2 parity, diagonal with entries +-1; squares to the identity."""
    return OperatorMatrix.wrap(sp.diags_array(parity_labels(t), format="csr"),
                               basis=_basis_tag(t, "full"))


def parity_indices(t: Truncation, sector: str) -> np.ndarray:
    """Full-basis indices belonging to a parity sector, in ascending order."""
    labels = parity_labels(t)
    if sector == "positive":
        return np.flatnonzero(labels > 0)
    if sector == "negative":
        return np.flatnonzero(labels < 0)
    raise ValueError(f"sector must be 'positive' or 'negative', got {sector!r}")


def project_parity(m: OperatorMatrix, t: Truncation,
                   sector: str) -> tuple[OperatorMatrix, np.ndarray]:
    """Restrict a parity-commuting operator to one sector.

    Returns the sector block and the index map embedding it back into the
    full basis.  Raises if the operator mixes the sectors, i.e. the caller
    passed something that does not commute with the parity.
    """
    idx = parity_indices(t, sector)
    comp = np.setdiff1d(np.arange(t.dim), idx, assume_unique=True)
    mat = m.mat.tocsr() if m.is_sparse else np.asarray(m.mat)
    off = mat[np.ix_(idx, comp)] if not sp.issparse(mat) else mat[idx][:, comp]
    off_max = 0.0
    if sp.issparse(off):
        off_max = float(np.max(np.abs(off.data))) if off.nnz else 0.0
    elif off.size:
        off_max = float(np.max(np.abs(off)))
    if off_max > 1e-12:
        raise ValueError(f"operator does not commute with parity (off-block max {off_max:.2e})")
    block = mat[np.ix_(idx, idx)] if not sp.issparse(mat) else mat[idx][:, idx]
    return OperatorMatrix.wrap(block, basis=m.basis + f"|{sector}"), idx


def _basis_tag(t: Truncation, sector: str) -> str:
    return f"product:n{t.n_max}:s{t.spin_dim}:{sector}"


def full_hamiltonian(p: ModelParams, t: Truncation,
                     max_dim: int = DEFAULT_MAX_DIM) -> OperatorMatrix:
    """Hamiltonian matrix on the photon-major product basis.

    With ``t.parity_sector`` set to 'positive' or 'negative' the projected
    block is returned instead of the full matrix.
    """
    _check_truncation(p, t)
    if t.dim > max_dim:
        raise TruncationError(f"basis dimension {t.dim} exceeds the guard {max_dim}")
    number, jz_full, rw, cr = _product_pieces(p, t)
    ham = p.omega * number + p.Omega * jz_full + p.lambda1 * rw + p.lambda2 * cr
    full = OperatorMatrix.wrap(ham, basis=_basis_tag(t, "full"))
    if t.parity_sector == "full":
        return full
    block, _ = project_parity(full, t, t.parity_sector)
    return block


def param_derivative(p: ModelParams, t: Truncation, which: str) -> OperatorMatrix:
    """Exact derivative of the Hamiltonian with respect to one primary parameter.

    Every derivative commutes with the parity, so the same sector projection
    as for the Hamiltonian applies (controlled by ``t.parity_sector``).
    """
    _check_truncation(p, t)
    if which not in PARAMETER_LABELS:
        raise ValueError(f"unknown parameter {which!r}; expected one of {PARAMETER_LABELS}")
    number, jz_full, rw, cr = _product_pieces(p, t)
    if which == "omega":
        deriv = number.astype(complex)
    elif which == "Omega":
        deriv = jz_full.astype(complex)
    elif which == "lambda1":
        deriv = rw
    elif which == "lambda2":
        deriv = cr
    else:  # theta: i [a'a, H], written out per coupling term
        _, adag, _ = (op.mat for op in boson_operators(t.n_max))
        jp, jm, _ = (op.mat for op in spin_operators(p.j))
        phase = np.exp(1j * p.theta)
        norm = 1.0 / math.sqrt(2 * p.j)
        up_minus = sp.kron(sp.csr_array(adag), sp.csr_array(jm), format="csr")
        up_plus = sp.kron(sp.csr_array(adag), sp.csr_array(jp), format="csr")
        anti_rw = phase * up_minus - np.conj(phase) * up_minus.conj().T
        anti_cr = phase * up_plus - np.conj(phase) * up_plus.conj().T
        deriv = 1j * norm * (p.lambda1 * anti_rw + p.lambda2 * anti_cr)
    full = OperatorMatrix.wrap(deriv, basis=_basis_tag(t, "full"))
    if t.parity_sector == "full":
        return full
    block, _ = project_parity(full, t, t.parity_sector)
    return block


def photon_number_diagonal(t: Truncation) -> np.ndarray:
    """Photon occupation per basis state, honoring the truncation's sector."""
    n = np.repeat(np.arange(t.n_max + 1, dtype=float), t.spin_dim)
    if t.parity_sector == "full":
        return n
    return n[parity_indices(t, t.parity_sector)]
