"""Dense linear-algebra helpers for the matrix stability analysis.

Thin, contract-checked wrappers over LAPACK (through numpy): a Lyapunov
solver built on the Kronecker vectorization, symmetric extreme eigenvalues,
spectral norm, and spectral abscissa. All tolerances are relative to
max(1, Frobenius scale) so tiny and huge systems are treated alike.
"""

from __future__ import annotations

import numpy as np

MAX_DIM = 64

LYAPUNOV_RESIDUAL_TOL = 1e-10
SYMMETRY_TOL = 1e-12


class LinalgError(Exception):
    """Base class for linear-algebra failures."""


class SpectrumError(LinalgError):
    """Spectrum violates a precondition (e.g. matrix is not Hurwitz)."""


class SingularSystem(LinalgError):
    """A linear system could not be solved to tolerance."""


class NotSymmetric(LinalgError):
    """Symmetry precondition violated beyond tolerance."""


class ConvergenceFailure(LinalgError):
    """Eigenvalue iteration failed to converge."""


def _square(M, name: str = "matrix") -> np.ndarray:
    A = np.asarray(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise LinalgError(f"{name} must be square, got shape {A.shape}")
    if A.shape[0] < 1 or A.shape[0] > MAX_DIM:
        raise LinalgError(f"{name} dimension {A.shape[0]} outside [1, {MAX_DIM}]")
    if not np.all(np.isfinite(A)):
        raise LinalgError(f"{name} contains non-finite entries")
    return A


def _scale(M: np.ndarray) -> float:
    return max(1.0, float(np.linalg.norm(M, "fro")))


def spectral_abscissa(A) -> float:
    """max Re(lambda) over the eigenvalues of A."""
    A = _square(A, "A")
    try:
        w = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"eigenvalue computation failed: {exc}") from exc
    return float(np.max(w.real))


def solve_lyapunov(A) -> np.ndarray:
    """Solve A^T C + C A = -I for symmetric positive definite C.

    Requires A Hurwitz (spectral abscissa < 0). Uses the Kronecker
    vectorization (I (x) A^T + A^T (x) I) vec(C) = -vec(I) with a dense LU
    solve, then symmetrizes. The residual ||A^T C + C A + I||_F must not
    exceed 1e-10 relative to max(1, ||C||_F).
    """
    A = _square(A, "A")
    mu = spectral_abscissa(A)
    if not mu < 0:
        raise SpectrumError(f"A must be Hurwitz; spectral abscissa = {mu:.6g}")
    d = A.shape[0]
    eye = np.eye(d)
    K = np.kron(eye, A.T) + np.kron(A.T, eye)
    rhs = -eye.flatten(order="F")
    try:
        vec_c = np.linalg.solve(K, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"Kronecker system is singular: {exc}") from exc
    C = vec_c.reshape((d, d), order="F")
    C = 0.5 * (C + C.T)
    residual = np.linalg.norm(A.T @ C + C @ A + eye, "fro")
    if not residual <= LYAPUNOV_RESIDUAL_TOL * _scale(C):
        raise SingularSystem(
            f"Lyapunov residual {residual:.3e} exceeds tolerance "
            f"{LYAPUNOV_RESIDUAL_TOL:.1e} * {_scale(C):.3e}")
    return C


def sym_eig_extremes(C) -> tuple:
    """(smallest, largest) eigenvalue of a symmetric matrix.

    The input must be symmetric up to 1e-12 relative asymmetry; it is
    symmetrized before the eigensolve.
    """
    C = _square(C, "C")
    asym = np.linalg.norm(C - C.T, "fro")
    if not asym <= SYMMETRY_TOL * _scale(C):
        raise NotSymmetric(
            f"asymmetry {asym:.3e} exceeds {SYMMETRY_TOL:.1e} * {_scale(C):.3e}")
    try:
        w = np.linalg.eigvalsh(0.5 * (C + C.T))
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"symmetric eigensolve failed: {exc}") from exc
    return float(w[0]), float(w[-1])


def spectral_norm(M) -> float:
    """Largest singular value, computed as sqrt(lambda_max(M^T M))."""
    M = _square(M, "M")
    G = M.T @ M
    G = 0.5 * (G + G.T)  # kill rounding asymmetry before the symmetric solve
    _, lam_max = sym_eig_extremes(G)
    return float(np.sqrt(max(lam_max, 0.0)))
