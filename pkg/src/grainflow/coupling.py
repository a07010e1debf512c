"""The 3x3 orientation-coupling matrix and its spectral properties.

For boundary lengths ``c = (c1, c2, c3)`` the matrix is::

    [[c1 + c2,   -c2,     -c1   ],
     [  -c2,   c2 + c3,   -c3   ],
     [  -c1,     -c3,   c3 + c1 ]]

a weighted graph Laplacian on the three grains around a junction.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateKernelError, DomainError


@dataclass(frozen=True)
class CouplingMatrix:
    c: np.ndarray
    entries: np.ndarray

    @property
    def scale(self):
        return float(np.sum(np.abs(self.c)))

    def __matmul__(self, other):
        return self.entries @ other


@dataclass(frozen=True)
class SpectralSummary:
    eigenvalues: np.ndarray
    kernel_dim: int


def coupling_entries(c1, c2, c3):
    """Raw 3x3 entries, no validation (used on the hot path)."""
    return np.array(
        [
            [c1 + c2, -c2, -c1],
            [-c2, c2 + c3, -c3],
            [-c1, -c3, c3 + c1],
        ]
    )


def build_coupling(c1, c2, c3):
    c = np.array([c1, c2, c3], dtype=float)
    if not np.all(np.isfinite(c)):
        raise DomainError(f"coupling weights must be finite, got {c}")
    if np.any(c < 0):
        raise DomainError(f"coupling weights must be non-negative, got {c}")
    return CouplingMatrix(c=c, entries=coupling_entries(*c))


def closed_form_eigenvalues(c1, c2, c3):
    """Eigenvalues ``0`` and ``s ± sqrt(((c1-c2)² + (c2-c3)² + (c3-c1)²)/2)``, ascending."""
    s = c1 + c2 + c3
    spread = math.sqrt(0.5 * ((c1 - c2) ** 2 + (c2 - c3) ** 2 + (c3 - c1) ** 2))
    return np.sort(np.array([0.0, s - spread, s + spread]))


def symmetric_eigvalsh3(m):
    """Eigenvalues of a real symmetric 3x3 matrix by the trigonometric cubic method.

    Works from the matrix entries alone; nothing about the coupling pattern is
    assumed. Returned in ascending order. Near a repeated eigenvalue the
    arccos step limits accuracy to about ``sqrt(eps)`` times the matrix scale,
    so this serves as a cross-check, not as the working solver.
    """
    m = np.asarray(m, dtype=float)
    p1 = m[0, 1] ** 2 + m[0, 2] ** 2 + m[1, 2] ** 2
    q = np.trace(m) / 3.0
    if p1 == 0.0:
        return np.sort(np.diag(m).copy())
    p2 = (m[0, 0] - q) ** 2 + (m[1, 1] - q) ** 2 + (m[2, 2] - q) ** 2 + 2.0 * p1
    p = math.sqrt(p2 / 6.0)
    bm = (m - q * np.eye(3)) / p
    r = np.linalg.det(bm) / 2.0
    r = min(1.0, max(-1.0, r))
    phi = math.acos(r) / 3.0
    e1 = q + 2.0 * p * math.cos(phi)
    e3 = q + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
    e2 = 3.0 * q - e1 - e3
    return np.sort(np.array([e1, e2, e3]))


def spectral_summary(matrix, rel_tol=1e-12):
    eig = np.linalg.eigvalsh(matrix.entries)
    thresh = rel_tol * max(1.0, matrix.scale)
    return SpectralSummary(eigenvalues=eig, kernel_dim=int(np.sum(np.abs(eig) <= thresh)))


def kernel_basis(matrix):
    """Normalised kernel vector ``(1, 1, 1)/sqrt(3)``.

    Only defined when every weight is strictly positive, which is what
    guarantees a one-dimensional kernel. A zero weight raises
    :class:`DegenerateKernelError` carrying the kernel dimension actually
    observed (it can still be 1, e.g. for ``(0, 1, 1)``).
    """
    if np.any(matrix.c <= 0):
        dim = spectral_summary(matrix).kernel_dim
        raise DegenerateKernelError(
            f"weights {matrix.c} are not all positive; kernel is not guaranteed simple "
            f"(observed dimension {dim})",
            kernel_dim=dim,
        )
    return np.full(3, 1.0 / math.sqrt(3.0))


def operator_bound(c1, c2, c3):
    """Upper bound ``3(|c1|+|c2|+|c3|)`` on the operator norm."""
    return 3.0 * (abs(c1) + abs(c2) + abs(c3))


def quadratic_form(matrix, alpha):
    alpha = np.asarray(alpha, dtype=float)
    return float(alpha @ (matrix.entries @ alpha))
