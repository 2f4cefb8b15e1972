"""Effective quadratic-boson Hamiltonians of the two classical limits.

Four models are provided, each exact in its limit and phase:

* ``cs_normal`` / ``cs_superradiant`` -- classical-spin limit (j -> inf at
  fixed frequency ratio), obtained by bosonizing the collective spin; two
  coupled modes ``a`` (field) and ``b`` (spin fluctuations).
* ``co_normal`` / ``co_superradiant`` -- classical-oscillator limit
  (Omega/omega -> inf at finite j), obtained by projecting onto the lowest
  spin state; a single quadratic mode.

All four are bilinear in ladder operators, so an exact symplectic
normal-mode treatment is available (see :func:`adicke.spectra.bogoliubov_modes`)
alongside the truncated-matrix route built here.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .model import DEFAULT_MAX_DIM, ModelParams, OperatorMatrix, boson_operators
from .errors import TruncationError


@dataclass(frozen=True)
class FockCutoff:
    """Fock-space cutoff(s) for the effective bases: one mode, or modes a and b."""

    n_a: int
    n_b: int | None = None

    def __post_init__(self):
        if self.n_a < 1 or (self.n_b is not None and self.n_b < 1):
            raise ValueError("Fock cutoffs must be at least 1")

    @property
    def modes(self) -> int:
        return 1 if self.n_b is None else 2

    @property
    def dim(self) -> int:
        d = self.n_a + 1
        if self.n_b is not None:
            d *= self.n_b + 1
        return d

    @property
    def tag(self) -> str:
        if self.n_b is None:
            return f"fock:{self.n_a}"
        return f"fock2:{self.n_a}x{self.n_b}"


@dataclass(frozen=True)
class DisplacementSolution:
    """Field displacement and spin-rotation cosine of the superradiant frame.

    ``alpha`` is the mean-field value of the mode (phase e^{i theta});
    ``valid_region`` is False when g < 1, where only the trivial solution
    alpha = 0 exists.
    """

    alpha: complex
    cos_delta: float
    valid_region: bool


def displacement_solution(p: ModelParams) -> DisplacementSolution:
    """Solve for the displacement/rotation that removes the linear terms.

    For g > 1 the nontrivial branch gives |alpha|^2 = 2j(L^4 - w^2 W^2) /
    (4 L^2 w^2) with L = lambda1 + lambda2, and cos(delta) = w W / L^2.
    At or below g = 1 the displacement vanishes.
    """
    lam = p.lambda1 + p.lambda2
    g = p.g
    if g <= 1.0:
        return DisplacementSolution(alpha=0.0 + 0.0j, cos_delta=1.0, valid_region=g >= 1.0)
    mag = math.sqrt(2 * p.j * (lam**4 - (p.omega * p.Omega) ** 2)) / (2 * lam * p.omega)
    return DisplacementSolution(alpha=cmath.exp(1j * p.theta) * mag,
                                cos_delta=p.omega * p.Omega / lam**2,
                                valid_region=True)


@dataclass(frozen=True)
class RescaledParams:
    """Displaced-frame spin frequency and coupling amplitudes (superradiant side).

    ``Omega_tilde = Omega g^2``; the primed couplings satisfy
    lambda1' + lambda2' = sqrt(omega Omega)/(g sqrt(2j)) and
    lambda1' - lambda2' = (lambda1 - lambda2)/sqrt(2j).
    """

    Omega_tilde: float
    lambda1_prime: float
    lambda2_prime: float


def rescaled_params(p: ModelParams) -> RescaledParams:
    """Rescaled parameters of the displaced frame; defined for g > 1 only."""
    g = p.g
    if g <= 1.0:
        raise ValueError(f"rescaled parameters need g > 1, got g = {g}")
    root = math.sqrt(p.omega * p.Omega)
    diff = p.lambda1 - p.lambda2
    norm = 2 * math.sqrt(2 * p.j)
    return RescaledParams(Omega_tilde=p.Omega * g * g,
                          lambda1_prime=(root / g + diff) / norm,
                          lambda2_prime=(root / g - diff) / norm)


@dataclass(frozen=True)
class QuadraticBosonForm:
    """Coefficient table of a quadratic boson Hamiltonian.

    Monomials carried: a'a, b'b, a'b, a'b' and a'^2 plus the scalar constant;
    each off-diagonal monomial implies its Hermitian conjugate with the
    conjugate coefficient, so Hermiticity is built in.
    """

    modes: int
    n_a: float
    const: float
    n_b: float = 0.0
    hop: complex = 0j      # a'b + h.c.
    pair: complex = 0j     # a'b' + h.c.
    squeeze: complex = 0j  # a'^2 + h.c.

    def __post_init__(self):
        if self.modes not in (1, 2):
            raise ValueError("modes must be 1 or 2")
        if self.modes == 1 and (self.n_b != 0.0 or self.hop != 0j or self.pair != 0j):
            raise ValueError("one-mode form cannot carry b-mode coefficients")


# ---------------------------------------------------------------------------
# the four builders


def cs_normal_form(p: ModelParams) -> QuadraticBosonForm:
    """Classical-spin limit, normal phase: two coupled modes.

    w a'a + W (b'b - j) + lambda1 (e^{it} a'b + h.c.) + lambda2 (e^{it} a'b' + h.c.)
    """
    phase = cmath.exp(1j * p.theta)
    return QuadraticBosonForm(modes=2, n_a=p.omega, n_b=p.Omega,
                              hop=p.lambda1 * phase, pair=p.lambda2 * phase,
                              const=-p.j * p.Omega)


def cs_superradiant_form(p: ModelParams) -> QuadraticBosonForm:
    """Classical-spin limit, superradiant phase (g > 1), displaced/rotated frame."""
    g = p.g
    if g <= 1.0:
        raise ValueError(f"superradiant frame needs g > 1, got g = {g}")
    lam = p.lambda1 + p.lambda2
    c_plus = p.omega * p.Omega / (2 * lam)
    c_minus = (p.lambda1 - p.lambda2) / 2
    phase = cmath.exp(1j * p.theta)
    const = -p.j * (lam**2 / (2 * p.omega) + p.omega * p.Omega**2 / (2 * lam**2))
    return QuadraticBosonForm(modes=2, n_a=p.omega, n_b=lam**2 / p.omega,
                              hop=(c_plus + c_minus) * phase,
                              pair=(c_plus - c_minus) * phase,
                              const=const)


def co_normal_form(p: ModelParams) -> QuadraticBosonForm:
    """Classical-oscillator limit, normal phase: a single quadratic mode.

    Expanding the projected coupling product gives
    [w - (l1^2 + l2^2)/W] a'a - (l1 l2 / W)(e^{2it} a'^2 + h.c.) - l2^2/W - jW.
    """
    phase2 = cmath.exp(2j * p.theta)
    return QuadraticBosonForm(
        modes=1,
        n_a=p.omega - (p.lambda1**2 + p.lambda2**2) / p.Omega,
        squeeze=-(p.lambda1 * p.lambda2 / p.Omega) * phase2,
        const=-p.lambda2**2 / p.Omega - p.j * p.Omega,
    )


def co_superradiant_form(p: ModelParams) -> QuadraticBosonForm:
    """Classical-oscillator limit, superradiant phase (g > 1).

    Same structure as the normal phase with the displaced-frame couplings.
    The primed amplitudes are used at the collective normalization (i.e. the
    1/sqrt(2j) they carry is undone before forming the projected quadratic
    model), which keeps the model j-independent apart from its constant and
    closes the gap at exactly g = 1.
    """
    g = p.g
    rp = rescaled_params(p)  # raises for g <= 1
    scale = math.sqrt(2 * p.j)
    lt1 = rp.lambda1_prime * scale
    lt2 = rp.lambda2_prime * scale
    phase2 = cmath.exp(2j * p.theta)
    return QuadraticBosonForm(
        modes=1,
        n_a=p.omega - (lt1**2 + lt2**2) / rp.Omega_tilde,
        squeeze=-(lt1 * lt2 / rp.Omega_tilde) * phase2,
        const=-lt2**2 / rp.Omega_tilde - 0.5 * p.j * p.Omega * (g**2 + g**-2),
    )


_FORMS = {
    "cs_np": cs_normal_form,
    "cs_sp": cs_superradiant_form,
    "co_np": co_normal_form,
    "co_sp": co_superradiant_form,
}


def effective_form(model: str, p: ModelParams) -> QuadraticBosonForm:
    """Coefficient table of one of the four effective models."""
    try:
        return _FORMS[model](p)
    except KeyError:
        raise ValueError(f"unknown effective model {model!r}; expected one of {sorted(_FORMS)}")


# ---------------------------------------------------------------------------
# matrices


def form_matrix(form: QuadraticBosonForm, cut: FockCutoff,
                max_dim: int = DEFAULT_MAX_DIM) -> OperatorMatrix:
    """Matrix of a quadratic form on the truncated Fock basis.

    Two-mode basis ordering is |n_a> x |n_b> with n_a outer.
    """
    if cut.modes != form.modes:
        raise ValueError(f"cutoff has {cut.modes} mode(s) but the form has {form.modes}")
    if cut.dim > max_dim:
        raise TruncationError(f"basis dimension {cut.dim} exceeds the guard {max_dim}")
    a, adag, n_op = (op.mat for op in boson_operators(cut.n_a))
    if form.modes == 1:
        ham = form.n_a * n_op.astype(complex)
        ham += form.squeeze * (adag @ adag) + np.conj(form.squeeze) * (a @ a)
        ham += form.const * np.eye(cut.n_a + 1)
        return OperatorMatrix.wrap(ham, basis=cut.tag)

    b, bdag, nb_op = (op.mat for op in boson_operators(cut.n_b))
    eye_a = sp.identity(cut.n_a + 1, format="csr")
    eye_b = sp.identity(cut.n_b + 1, format="csr")
    kron = lambda x, y: sp.kron(sp.csr_array(x), sp.csr_array(y), format="csr")
    up_down = kron(adag, b)      # a'b
    up_up = kron(adag, bdag)     # a'b'
    asq = kron(adag @ adag, np.eye(cut.n_b + 1))
    ham = form.n_a * sp.kron(sp.csr_array(n_op), eye_b, format="csr").astype(complex)
    ham += form.n_b * sp.kron(eye_a, sp.csr_array(nb_op), format="csr")
    ham += form.hop * up_down + np.conj(form.hop) * up_down.conj().T
    ham += form.pair * up_up + np.conj(form.pair) * up_up.conj().T
    ham += form.squeeze * asq + np.conj(form.squeeze) * asq.conj().T
    ham += form.const * sp.identity(cut.dim, format="csr")
    return OperatorMatrix.wrap(ham, basis=cut.tag)


def cs_normal_hamiltonian(p: ModelParams, cut: FockCutoff) -> OperatorMatrix:
    return form_matrix(cs_normal_form(p), cut)


def cs_superradiant_hamiltonian(p: ModelParams, cut: FockCutoff) -> OperatorMatrix:
    return form_matrix(cs_superradiant_form(p), cut)


def co_normal_hamiltonian(p: ModelParams, cut: FockCutoff) -> OperatorMatrix:
    return form_matrix(co_normal_form(p), cut)


def co_superradiant_hamiltonian(p: ModelParams, cut: FockCutoff) -> OperatorMatrix:
    return form_matrix(co_superradiant_form(p), cut)


def boson_parity_labels(cut: FockCutoff) -> np.ndarray:
    """Diagonal of exp{i pi sum_k n_k} on the effective basis."""
    na = np.arange(cut.n_a + 1)
    if cut.modes == 1:
        total = na
    else:
        total = np.add.outer(na, np.arange(cut.n_b + 1)).ravel()
    return np.where(total % 2 == 0, 1.0, -1.0)


def mode_a_number_diagonal(cut: FockCutoff) -> np.ndarray:
    """Occupation of mode a per basis state."""
    na = np.arange(cut.n_a + 1, dtype=float)
    if cut.modes == 1:
        return na
    return np.repeat(na, cut.n_b + 1)


# ---------------------------------------------------------------------------
# coefficient extraction (feeds the symplectic oracle)


def quadratic_form(m: OperatorMatrix, cut: FockCutoff,
                   tol: float = 1e-14) -> QuadraticBosonForm:
    """Read the coefficient table back off a matrix.

    The extracted coefficients must rebuild the matrix entrywise (relative to
    its scale); anything else -- linear terms, cubic terms, a foreign basis --
    is rejected.
    """
    mat = m.toarray()
    if mat.shape[0] != cut.dim:
        raise ValueError(f"matrix dimension {mat.shape[0]} does not match cutoff dim {cut.dim}")
    if cut.modes == 1:
        const = mat[0, 0].real
        form = QuadraticBosonForm(
            modes=1,
            n_a=(mat[1, 1] - mat[0, 0]).real,
            squeeze=complex(mat[2, 0]) / math.sqrt(2),
            const=const,
        )
    else:
        nb1 = cut.n_b + 1
        idx = lambda na, nb: na * nb1 + nb
        const = mat[0, 0].real
        form = QuadraticBosonForm(
            modes=2,
            n_a=(mat[idx(1, 0), idx(1, 0)] - const).real,
            n_b=(mat[idx(0, 1), idx(0, 1)] - const).real,
            hop=complex(mat[idx(1, 0), idx(0, 1)]),
            pair=complex(mat[idx(1, 1), idx(0, 0)]),
            squeeze=complex(mat[idx(2, 0), idx(0, 0)]) / math.sqrt(2),
            const=const,
        )
    rebuilt = form_matrix(form, cut).toarray()
    scale = max(1.0, float(np.max(np.abs(mat))))
    defect = float(np.max(np.abs(rebuilt - mat)))
    if defect > tol * scale:
        raise ValueError(f"matrix is not quadratic in the expected monomials "
                         f"(rebuild defect {defect:.2e})")
    return form


# ---------------------------------------------------------------------------
# parameter derivatives of the effective models


def theta_derivative_matrix(ham: OperatorMatrix, cut: FockCutoff) -> OperatorMatrix:
    """d H / d theta = i [n_a, H], exact for every effective model.

    All theta dependence enters through phases of mode-a raising operators,
    so the commutator with the mode-a number operator generates it.
    """
    n_diag = mode_a_number_diagonal(cut)
    mat = ham.mat
    if sp.issparse(mat):
        n_op = sp.diags_array(n_diag, format="csr")
        deriv = 1j * (n_op @ mat - mat @ n_op)
    else:
        deriv = 1j * (n_diag[:, None] * mat - mat * n_diag[None, :])
    return OperatorMatrix.wrap(deriv, basis=ham.basis)


def _form_vector(form: QuadraticBosonForm) -> np.ndarray:
    return np.array([form.n_a, form.n_b, form.hop, form.pair, form.squeeze, form.const],
                    dtype=complex)


def _vector_form(vec: np.ndarray, modes: int) -> QuadraticBosonForm:
    return QuadraticBosonForm(modes=modes, n_a=vec[0].real, n_b=vec[1].real if modes == 2 else 0.0,
                              hop=vec[2] if modes == 2 else 0j,
                              pair=vec[3] if modes == 2 else 0j,
                              squeeze=vec[4], const=vec[5].real)


def form_param_derivative(model: str, p: ModelParams, which: str,
                          step: float | None = None) -> QuadraticBosonForm:
    """Coefficient-wise derivative of an effective model's form.

    Uses a five-point fourth-order stencil on the (analytic) coefficient
    functions; for the superradiant forms the step is shrunk so the stencil
    never leaves the g > 1 domain.
    """
    build = _FORMS[model]
    h = step if step is not None else 2e-4 * max(1.0, abs(getattr(p, which)))
    if model.endswith("_sp"):
        for _ in range(60):
            try:
                if p.shifted(which, 2 * h).g > 1.0 and p.shifted(which, -2 * h).g > 1.0:
                    break
            except ValueError:
                pass
            h /= 2
        else:
            raise ValueError("cannot differentiate this close to the critical point")
    samples = [_form_vector(build(p.shifted(which, k * h))) for k in (-2, -1, 1, 2)]
    vec = (samples[0] - 8 * samples[1] + 8 * samples[2] - samples[3]) / (12 * h)
    return _vector_form(vec, build(p).modes)


def effective_param_derivative(model: str, p: ModelParams, cut: FockCutoff,
                               which: str) -> OperatorMatrix:
    """Matrix of d H_eff / d(which) on the truncated basis."""
    if which == "theta":
        return theta_derivative_matrix(form_matrix(effective_form(model, p), cut), cut)
    dform = form_param_derivative(model, p, which)
    return form_matrix(dform, cut)
