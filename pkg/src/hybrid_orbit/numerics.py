"""Dense linear-algebra kernel used by every other module.

Everything here operates on plain numpy arrays (real, row-major, finite)
and is a pure function of its inputs, so all routines are safe to call
from multiple threads.
"""

import numpy as np

__all__ = [
    "NumericsError",
    "as_matrix",
    "eigenvalues",
    "spectral_radius",
    "spectral_norm",
    "max_abs_entry",
    "pinv",
    "dare_solve",
    "dlqr_gain",
]


class NumericsError(RuntimeError):
    """A numerical routine failed to converge or produced invalid output."""


def as_matrix(values) -> np.ndarray:
    """Coerce to a 2-D float array and reject NaN/Inf entries."""
    m = np.asarray(values, dtype=float)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")
    return m


def _require_square(m: np.ndarray, who: str) -> np.ndarray:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"{who} requires a square matrix, got {m.shape}")
    return m


def eigenvalues(m) -> np.ndarray:
    """All eigenvalues of a square real matrix, with multiplicity.

    Returned as a complex array sorted by descending magnitude (ties broken
    by real part, then imaginary part) so repeated calls give identical
    orderings.  For real input the set is closed under conjugation.
    """
    m = _require_square(m, "eigenvalues")
    try:
        vals = np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise NumericsError(f"eigenvalue iteration did not converge: {exc}") from exc
    order = np.lexsort((vals.imag, vals.real, -np.abs(vals)))
    return vals[order]


def spectral_radius(m) -> float:
    """Largest eigenvalue magnitude of a square matrix."""
    return float(np.max(np.abs(eigenvalues(m))))


def spectral_norm(m) -> float:
    """Largest singular value (the matrix 2-norm)."""
    m = as_matrix(m)
    try:
        return float(np.linalg.svd(m, compute_uv=False)[0])
    except np.linalg.LinAlgError as exc:
        raise NumericsError(f"SVD did not converge: {exc}") from exc


def max_abs_entry(m) -> float:
    """Largest entry magnitude.  n * max_abs_entry(m) is a matrix norm."""
    return float(np.max(np.abs(as_matrix(m))))


def pinv(m, rel_tol: float = 1e-10) -> np.ndarray:
    """Moore-Penrose pseudoinverse via SVD.

    Singular values below rel_tol times the largest are treated as zero,
    which makes rank-deficient input well defined instead of an error.
    """
    if rel_tol <= 0.0:
        raise ValueError("rel_tol must be positive")
    m = as_matrix(m)
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    if s.size and s[0] > 0.0:
        inv = np.where(s > rel_tol * s[0], 1.0 / np.where(s > 0, s, 1.0), 0.0)
    else:
        inv = np.zeros_like(s)
    return (vt.T * inv) @ u.T


def _check_weight(q: np.ndarray, name: str, definite: bool) -> np.ndarray:
    q = _require_square(q, name)
    scale = max(1.0, float(np.max(np.abs(q))))
    if np.max(np.abs(q - q.T)) > 1e-8 * scale:
        raise ValueError(f"{name} must be symmetric")
    eigs = np.linalg.eigvalsh(0.5 * (q + q.T))
    if definite and eigs[0] <= 0.0:
        raise ValueError(f"{name} must be positive definite")
    if not definite and eigs[0] < -1e-10 * scale:
        raise ValueError(f"{name} must be positive semi-definite")
    return 0.5 * (q + q.T)


def dare_solve(a, b, q, r, tol: float = 1e-12, max_iter: int = 10000) -> np.ndarray:
    """Solve the discrete algebraic Riccati equation by fixed-point iteration.

    Iterates P <- A'PA - A'PB (B'PB + R)^-1 B'PA + Q from P = Q until the
    successive-iterate difference falls below tol (relative to the scale of
    P).  Non-convergence within max_iter is reported as unstabilizable or
    ill-conditioned rather than returning a wrong answer; the residual of
    the returned P is checked independently of the iteration.
    """
    a = _require_square(a, "dare_solve")
    b = as_matrix(b)
    if b.shape[0] != a.shape[0]:
        raise ValueError(f"B has {b.shape[0]} rows, expected {a.shape[0]}")
    q = _check_weight(q, "Q", definite=False)
    r = _check_weight(r, "R", definite=True)
    if q.shape != a.shape:
        raise ValueError("Q must match the state dimension")
    if r.shape[0] != b.shape[1]:
        raise ValueError("R must match the input dimension")

    p = q.copy()
    for _ in range(max_iter):
        btp = b.T @ p
        try:
            gain = np.linalg.solve(btp @ b + r, btp @ a)
        except np.linalg.LinAlgError as exc:
            raise NumericsError(f"Riccati iteration hit a singular solve: {exc}") from exc
        p_next = a.T @ p @ a - (btp @ a).T @ gain + q
        p_next = 0.5 * (p_next + p_next.T)
        if not np.all(np.isfinite(p_next)) or np.max(np.abs(p_next)) > 1e100:
            raise NumericsError(
                "Riccati iteration diverged: (A, B) unstabilizable or ill-conditioned"
            )
        if np.max(np.abs(p_next - p)) < tol * max(1.0, np.max(np.abs(p_next))):
            p = p_next
            break
        p = p_next
    else:
        raise NumericsError(
            "Riccati iteration did not converge: (A, B) unstabilizable or ill-conditioned"
        )

    residual = _dare_residual(a, b, q, r, p)
    if residual > 1e-8 * max(1.0, np.max(np.abs(p))):
        raise NumericsError(f"Riccati residual {residual:.3e} above tolerance")
    return p


def _dare_residual(a, b, q, r, p) -> float:
    btp = b.T @ p
    gain = np.linalg.solve(btp @ b + r, btp @ a)
    return float(np.max(np.abs(a.T @ p @ a - (btp @ a).T @ gain + q - p)))


def dlqr_gain(a, b, q, r) -> np.ndarray:
    """Discrete LQR gain K = (B'PB + R)^-1 B'PA with P from dare_solve.

    The closed loop A - B K is verified to be a strict contraction.
    """
    a = _require_square(a, "dlqr_gain")
    b = as_matrix(b)
    p = dare_solve(a, b, q, r)
    gain = np.linalg.solve(b.T @ p @ b + np.asarray(r, dtype=float), b.T @ p @ a)
    closed = a - b @ gain
    rho = spectral_radius(closed)
    if rho >= 1.0:
        raise NumericsError(f"DLQR closed loop is not a contraction (rho = {rho:.6f})")
    return gain
