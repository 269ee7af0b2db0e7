"""Gram matrices of quadratic exponential vectors and PSD diagnostics."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import fock_core, stepfn
from .errors import DomainViolation, NotHermitian

__all__ = [
    "GramReport",
    "IndependenceVerdict",
    "gram_matrix",
    "hadamard_power",
    "is_psd",
    "linear_independence",
    "min_eigenvalue",
    "verify_schur_powers",
]

DEFAULT_TOL = 1e-10
HERMITIAN_ATOL = 1e-14


def _check_hermitian(m: np.ndarray, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotHermitian(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m), initial=0.0)))
    if not np.allclose(m, m.conj().T, rtol=0.0, atol=atol * scale):
        raise NotHermitian("matrix is not Hermitian")
    return m


def min_eigenvalue(m: np.ndarray) -> float:
    m = _check_hermitian(m)
    return float(np.linalg.eigvalsh(m).min()) if m.size else 0.0


def is_psd(m, tol: float = 1e-12) -> bool:
    """True iff the smallest eigenvalue is at least ``-tol * ||m||_2``."""
    m = _check_hermitian(m)
    if not m.size:
        return True
    eig = np.linalg.eigvalsh(m)
    norm = float(np.max(np.abs(eig)))
    return bool(eig.min() >= -tol * norm)


def hadamard_power(m, n: int) -> np.ndarray:
    if n < 0:
        raise ValueError("power must be nonnegative")
    return np.asarray(m) ** n


def verify_schur_powers(m, n_max: int, tol: float = 1e-12) -> dict:
    """PSD status of the entrywise powers 1..n_max and of the entrywise exp."""
    m = _check_hermitian(m)
    out = {n: is_psd(hadamard_power(m, n), tol) for n in range(1, n_max + 1)}
    out["exp"] = is_psd(np.exp(m), tol)
    return out


@dataclass(frozen=True)
class GramReport:
    matrix: np.ndarray
    kernel_matrix: np.ndarray
    min_eigenvalue: float
    spectral_norm: float
    psd: bool
    independent: bool
    pairwise_distinct: np.ndarray
    tol: float

    @property
    def margin(self) -> float:
        """Smallest eigenvalue relative to the spectral norm."""
        return self.min_eigenvalue / self.spectral_norm if self.spectral_norm else 0.0


def _kernel_entry(fi, fj, c) -> complex:
    return -(float(c) / 2.0) * stepfn.log_integral(fi, fj)


def gram_matrix(
    fs: Sequence[stepfn.MeasuredCellFunction], c, tol: float = DEFAULT_TOL, jobs: int = 1
) -> GramReport:
    """``b_ij = <Psi(f_i), Psi(f_j)> = exp(a_ij)`` with
    ``a_ij = -(c/2) int ln(1 - 4 conj(f_i) f_j)``.
    """
    for i, f in enumerate(fs):
        if not fock_core.exists_exponential(f).exists:
            raise DomainViolation(f"function #{i} has sup norm >= 1/2")
    fs = stepfn.common_refinement(*fs)
    n = len(fs)
    pairs = [(i, j) for i in range(n) for j in range(i, n)]

    def entry(ij):
        i, j = ij
        return _kernel_entry(fs[i], fs[j], c)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            values = list(pool.map(entry, pairs))
    else:
        values = [entry(p) for p in pairs]

    kernel = np.zeros((n, n), dtype=complex)
    for (i, j), a in zip(pairs, values):
        kernel[i, j] = a
        kernel[j, i] = np.conj(a)
    for i in range(n):
        kernel[i, i] = kernel[i, i].real
    matrix = np.exp(kernel)

    distinct = np.zeros((n, n), dtype=bool)
    for i, j in pairs:
        if i != j:
            d = stepfn.measure_where_different(fs[i], fs[j]) > 0
            distinct[i, j] = distinct[j, i] = d

    eig = np.linalg.eigvalsh(matrix) if n else np.zeros(0)
    lam_min = float(eig.min()) if n else 0.0
    norm = float(np.max(np.abs(eig))) if n else 0.0
    return GramReport(
        matrix=matrix,
        kernel_matrix=kernel,
        min_eigenvalue=lam_min,
        spectral_norm=norm,
        psd=bool(lam_min >= -tol * norm),
        independent=bool(lam_min > tol * norm),
        pairwise_distinct=distinct,
        tol=tol,
    )


@dataclass(frozen=True)
class IndependenceVerdict:
    independent: bool
    min_eigenvalue: float
    spectral_norm: float
    hypothesis_holds: bool
    report: GramReport


def linear_independence(fs, c, tol: float = DEFAULT_TOL) -> IndependenceVerdict:
    """Independence of ``Psi(f_1..f_N)`` from the Gram matrix spectrum.

    ``hypothesis_holds`` records whether every pair differs on a set of
    positive measure, the condition under which independence is guaranteed.
    """
    report = gram_matrix(fs, c, tol)
    n = len(fs)
    off = ~np.eye(n, dtype=bool)
    hyp = bool(np.all(report.pairwise_distinct[off])) if n > 1 else True
    return IndependenceVerdict(
        report.independent, report.min_eigenvalue, report.spectral_norm, hyp, report
    )
