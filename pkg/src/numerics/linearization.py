import logging

import numpy as np
from scipy import linalg

from src.numerics.spectral_core import multiplier_matrix, spectral_derivative
from src.numerics.groundstate import pointwise_power

logger = logging.getLogger(__file__)

SYMMETRY_TOL = 1e-10
OVERLAP_MIN = 0.999
GAP_FACTOR = 10.0


class DenseOperator:
    """Symmetric N x N matrix of an operator on a GridSpec."""

    def __init__(self, grid, matrix, label=""):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.shape != (grid.N, grid.N):
            raise ValueError("Operator matrix must be {0}x{0}, got {1}".format(grid.N, matrix.shape))
        scale = max(1.0, float(np.max(np.abs(matrix))))
        defect = float(np.max(np.abs(matrix - matrix.T)))
        if defect > SYMMETRY_TOL * scale:
            raise ValueError("Operator {} is not symmetric (defect {:.3e})".format(label, defect))
        self.grid = grid
        self.matrix = 0.5 * (matrix + matrix.T)
        self.label = label

    def __matmul__(self, vector):
        return self.matrix @ vector

    def trace(self):
        return float(np.trace(self.matrix))

    def __repr__(self):
        return "DenseOperator({}, N={})".format(self.label, self.grid.N)


class SpectralReport:
    def __init__(self, eigenvalues, eigenvectors, zero_tol, overlaps=None, label=""):
        self.eigenvalues = eigenvalues
        self.eigenvectors = eigenvectors
        self.zero_tol = zero_tol
        self.zero_modes = [int(i) for i in np.flatnonzero(np.abs(eigenvalues) <= zero_tol)]
        self.morse_index = int(np.sum(eigenvalues < -zero_tol))
        self.overlaps = overlaps or {}
        self.label = label

    def to_record(self, n_eigenvalues=None):
        values = self.eigenvalues if n_eigenvalues is None else self.eigenvalues[:n_eigenvalues]
        return {
            "operator": self.label,
            "eigenvalues": [float(x) for x in values],
            "zero_tol": self.zero_tol,
            "zero_modes": self.zero_modes,
            "morse_index": self.morse_index,
            "overlaps": self.overlaps,
        }

    def to_rows(self):
        return [(i, float(x)) for i, x in enumerate(self.eigenvalues)]


class NondegeneracyReport:
    def __init__(self, status, zero_eigenvalue, next_eigenvalue, overlap, zero_tol, morse_index):
        self.status = status
        self.zero_eigenvalue = zero_eigenvalue
        self.next_eigenvalue = next_eigenvalue
        self.overlap = overlap
        self.zero_tol = zero_tol
        self.morse_index = morse_index

    @property
    def passed(self):
        return self.status == "pass"

    def to_record(self):
        return {
            "status": self.status,
            "zero_eigenvalue": self.zero_eigenvalue,
            "next_eigenvalue": self.next_eigenvalue,
            "gap_ratio": abs(self.next_eigenvalue) / self.zero_tol,
            "overlap": self.overlap,
            "zero_tol": self.zero_tol,
            "morse_index": self.morse_index,
        }


def build_linearized(m, mu, c, Q, p):
    """m(D) + mu - c Q^p as a dense matrix on Q's grid."""
    if not float(p).is_integer() and np.min(Q.values) < 0:
        raise ValueError("Non-integer power {} needs Q >= 0".format(p))
    matrix = multiplier_matrix(m, Q.grid)
    diag = mu - c * pointwise_power(Q.values, p)
    matrix[np.diag_indices_from(matrix)] += diag
    label = "{} + {:g} - {:g} Q^{:g}".format(m.label, mu, c, p) if c else "{} + {:g}".format(m.label, mu)
    return DenseOperator(Q.grid, matrix, label)


def default_zero_tol(eigenvalues):
    return 1e-6 * float(np.max(np.abs(eigenvalues)))


def eigensolve(D, zero_tol=None, references=None):
    try:
        eigenvalues, eigenvectors = np.linalg.eigh(D.matrix)
    except np.linalg.LinAlgError as e:
        raise RuntimeError("Eigensolver failed for {}: {}".format(D.label, e))
    zero_tol = default_zero_tol(eigenvalues) if zero_tol is None else zero_tol
    report = SpectralReport(eigenvalues, eigenvectors, zero_tol, label=D.label)
    if references:
        for name, vector in references.items():
            vector = np.asarray(vector, dtype=float)
            vector = vector / np.linalg.norm(vector)
            report.overlaps[name] = [float(abs(eigenvectors[:, i] @ vector)) for i in report.zero_modes]
    logger.info("{}: lowest eigenvalues {}".format(D.label, np.round(eigenvalues[:4], 8).tolist()))
    return report


def nondegeneracy_check(D, Q, zero_tol=None):
    """Kernel of D spanned by Q' alone, with a clear gap to the rest of the spectrum."""
    if D.grid != Q.grid:
        raise ValueError("Grid mismatch between operator and profile")
    dQ = spectral_derivative(Q).values
    report = eigensolve(D, zero_tol, references={"dQ": dQ})
    order = np.argsort(np.abs(report.eigenvalues))
    first, second = order[0], order[1]
    zero_eig = float(report.eigenvalues[first])
    next_eig = float(report.eigenvalues[second])
    overlap = float(abs(report.eigenvectors[:, first] @ dQ) / np.linalg.norm(dQ))
    tol = report.zero_tol
    if abs(zero_eig) > tol or abs(next_eig) <= tol:
        status = "fail"
    elif abs(next_eig) <= GAP_FACTOR * tol:
        status = "inconclusive"
    elif overlap < OVERLAP_MIN:
        status = "fail"
    else:
        status = "pass"
    logger.info("Non-degeneracy of {}: {} (zero {:.3e}, next {:.3e}, overlap {:.6f})".format(
        D.label, status, zero_eig, next_eig, overlap))
    return NondegeneracyReport(status, zero_eig, next_eig, overlap, tol, report.morse_index), report


def even_indices(N):
    idx = np.arange(N // 2 + 1)
    mirror = (N - idx) % N
    interior = (idx > 0) & (idx < N // 2)
    return idx, mirror, interior


def fold_even(matrix):
    """Action of an even-preserving matrix on the even samples j = 0..N/2."""
    N = matrix.shape[0]
    idx, mirror, interior = even_indices(N)
    return matrix[np.ix_(idx, idx)] + matrix[np.ix_(idx, mirror)] * interior[None, :]


def even_weights(N):
    _, _, interior = even_indices(N)
    return np.where(interior, 2.0, 1.0)


def symmetric_even_block(folded):
    w = np.sqrt(even_weights(folded.shape[0] * 2 - 2))
    block = w[:, None] * folded / w[None, :]
    return 0.5 * (block + block.T)


def even_block(D):
    """Orthogonal restriction of D to even grid functions."""
    return symmetric_even_block(fold_even(D.matrix))


def odd_block(D):
    N = D.grid.N
    idx = np.arange(1, N // 2)
    block = D.matrix[np.ix_(idx, idx)] - D.matrix[np.ix_(idx, N - idx)]
    return 0.5 * (block + block.T)


def even_gap(D):
    return float(np.min(np.abs(linalg.eigvalsh(even_block(D)))))


def parity_spectra(D):
    return linalg.eigvalsh(even_block(D)), linalg.eigvalsh(odd_block(D))
