"""Uniform access to every model variant: matrices, ground states, tensors.

The sweep layer and the tests talk to the five concrete variants ("full",
"cs_np", "cs_sp", "co_np", "co_sp") through one interface; the "auto_cs" /
"auto_co" names resolve to the phase matching the coupling before any matrix
is built.
"""

from __future__ import annotations

import numpy as np

from . import effective, model, spectra
from .errors import DegeneracyError
from .geometry import (QGTComponents, qgt_finite_difference, qgt_matrix_solve,
                       qgt_matrix_sum)
from .model import ModelParams, OperatorMatrix, Truncation
from .effective import FockCutoff

CONCRETE_MODELS = ("full", "cs_np", "cs_sp", "co_np", "co_sp")
AUTO_MODELS = ("auto_cs", "auto_co")
MODEL_CHOICES = CONCRETE_MODELS + AUTO_MODELS

#: Above this dimension the default tensor method switches from the
#: full-spectrum sum to the resolvent linear solve.
SUM_METHOD_DIM_LIMIT = 1500

#: Ground states come from the dense solver at or below this dimension.
DENSE_GROUND_LIMIT = 1200


def resolve_branch(name: str, g: float) -> str:
    """Map an auto variant to its phase at coupling g (normal at g <= 1)."""
    if name == "auto_cs":
        return "cs_np" if g <= 1.0 else "cs_sp"
    if name == "auto_co":
        return "co_np" if g <= 1.0 else "co_sp"
    if name in CONCRETE_MODELS:
        return name
    raise ValueError(f"unknown model {name!r}; expected one of {MODEL_CHOICES}")


def _check_trunc(name: str, trunc) -> None:
    if name == "full":
        if not isinstance(trunc, Truncation):
            raise TypeError("the full model takes a Truncation")
    else:
        if not isinstance(trunc, FockCutoff):
            raise TypeError("effective models take a FockCutoff")
        want = 2 if name.startswith("cs") else 1
        if trunc.modes != want:
            raise ValueError(f"{name} needs a {want}-mode cutoff")


def hamiltonian_matrix(name: str, p: ModelParams, trunc) -> OperatorMatrix:
    _check_trunc(name, trunc)
    if name == "full":
        return model.full_hamiltonian(p, trunc)
    return effective.form_matrix(effective.effective_form(name, p), trunc)


def derivative_matrix(name: str, p: ModelParams, trunc, which: str) -> OperatorMatrix:
    _check_trunc(name, trunc)
    if name == "full":
        return model.param_derivative(p, trunc, which)
    return effective.effective_param_derivative(name, p, trunc, which)


def ground_pair(name: str, p: ModelParams, trunc,
                prefer_dense: bool | None = None) -> tuple[float, np.ndarray, float]:
    """Ground energy, gauge-fixed ground state, and the matrix gap above it."""
    ham = hamiltonian_matrix(name, p, trunc)
    dense = prefer_dense if prefer_dense is not None else ham.dim <= DENSE_GROUND_LIMIT
    if dense and ham.dim <= spectra.DENSE_EIG_LIMIT:
        es = spectra.dense_eigensystem(ham)
    else:
        es = spectra.lowest_k(ham, 2)
    gap = float(es.energies[1] - es.energies[0]) if es.count > 1 else float("nan")
    return float(es.energies[0]), es.states[:, 0], gap


def ground_state(name: str, p: ModelParams, trunc) -> np.ndarray:
    """Gauge-fixed ground state only (builder shape used by finite differences)."""
    return ground_pair(name, p, trunc)[1]


def photon_number_diagonal(name: str, trunc) -> np.ndarray:
    """Occupation of the field mode per basis state of the variant's basis."""
    if name == "full":
        return model.photon_number_diagonal(trunc)
    return effective.mode_a_number_diagonal(trunc)


def model_gap(name: str, p: ModelParams, trunc) -> float:
    """Lowest excitation energy: symplectic for quadratic models, spectral else."""
    if name == "full":
        return ground_pair(name, p, trunc)[2]
    modes = spectra.bogoliubov_modes(effective.effective_form(name, p))
    return modes.gap if modes.stable else float("nan")


def qgt_components(name: str, p: ModelParams, trunc,
                   labels=("theta", "omega"), method: str | None = None,
                   richardson: bool | None = None) -> QGTComponents:
    """Ground-state tensor over a label subset, by any of the three methods.

    ``method`` is one of "sum", "solve", "fd"; by default the full-spectrum
    sum is used up to SUM_METHOD_DIM_LIMIT and the linear solve above it.
    """
    _check_trunc(name, trunc)
    labels = tuple(labels)
    dim = trunc.dim
    if method is None:
        method = "sum" if dim <= SUM_METHOD_DIM_LIMIT else "solve"
    if method == "fd":
        builder = lambda q: ground_state(name, q, trunc)
        return qgt_finite_difference(builder, p, labels, richardson=richardson)
    derivs = [derivative_matrix(name, p, trunc, label) for label in labels]
    if method == "sum":
        es = spectra.dense_eigensystem(hamiltonian_matrix(name, p, trunc))
        return qgt_matrix_sum(es, derivs, labels)
    if method == "solve":
        ham = hamiltonian_matrix(name, p, trunc)
        energy, psi, gap = ground_pair(name, p, trunc)
        scale = max(1.0, abs(energy))
        if gap < spectra.DEGENERACY_RTOL * scale:
            raise DegeneracyError(f"ground gap {gap:.2e} is below the degeneracy tolerance")
        return qgt_matrix_solve(ham, energy, psi, derivs, labels)
    raise ValueError(f"unknown method {method!r}; expected 'sum', 'solve' or 'fd'")


def qfi_omega(name: str, p: ModelParams, trunc, method: str | None = None) -> float:
    """Fisher information of the field frequency, 4 G_omega_omega."""
    comp = qgt_components(name, p, trunc, labels=("omega",), method=method)
    return comp.qfi("omega").value


def default_truncation(name: str, p: ModelParams, n_max: int,
                       n_max_b: int | None = None, sector: str = "positive"):
    """The natural truncation object for a variant."""
    if name == "full":
        return Truncation.for_spin(n_max, p.j, parity_sector=sector)
    if name.startswith("cs"):
        return FockCutoff(n_max, n_max_b if n_max_b is not None else n_max)
    return FockCutoff(n_max)
