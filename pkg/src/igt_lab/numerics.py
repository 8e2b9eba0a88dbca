"""Dense and sparse matrix kernels shared by every other module.

Dense matrices are plain ``numpy.ndarray`` of float64, sparse operators are
``scipy.sparse.csr_array`` with symmetric structure and nonnegative values.
All routines are pure and deterministic; the power iteration draws its start
vector from a fixed sub-seed so repeated calls give identical results.
"""

import warnings

import numpy as np
from scipy import sparse

from .errors import ConvergenceError, NonFiniteError, ShapeError

# Start vector of every power iteration comes from this stream.
_POWER_SEED = 0x51AB

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 10_000


def _require_finite(m: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(m)):
        raise NonFiniteError(f"{what} contains non-finite entries")


def spmm(a: sparse.csr_array, x: np.ndarray) -> np.ndarray:
    """Sparse-dense product ``a @ x`` with an explicit shape contract.

    Accumulation is row-major (scipy CSR order), so results are reproducible
    bit-for-bit on a given platform.
    """
    n = a.shape[0]
    if a.shape[1] != x.shape[0]:
        raise ShapeError(
            f"operator is {a.shape[0]}x{a.shape[1]} but matrix has {x.shape[0]} rows",
            left=a.shape,
            right=x.shape,
        )
    out = a @ x
    return np.asarray(out)


def frobenius_norm(m: np.ndarray) -> float:
    """Entrywise l2 norm, sqrt(sum m_ij^2)."""
    m = np.asarray(m)
    _require_finite(m, "matrix")
    return float(np.sqrt(np.sum(m * m)))


def spectral_norm(
    m,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> float:
    """Largest singular value via power iteration on ``m^T m``.

    Works for dense arrays and scipy sparse matrices alike; only matvecs are
    used. Stops when the relative change of the estimate drops below ``tol``;
    warns if ``max_iter`` is hit first.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if sparse.issparse(m):
        data = m.data if hasattr(m, "data") else None
        if data is not None and not np.all(np.isfinite(data)):
            raise NonFiniteError("operator contains non-finite entries")
    else:
        m = np.asarray(m, dtype=np.float64)
        _require_finite(m, "matrix")
    rows, cols = m.shape
    if rows == 0 or cols == 0:
        return 0.0
    rng = np.random.default_rng(_POWER_SEED)
    v = rng.standard_normal(cols)
    v /= np.linalg.norm(v)
    estimate = 0.0
    for it in range(1, max_iter + 1):
        w = m @ v
        new = float(np.linalg.norm(w))
        if new == 0.0:
            return 0.0
        v = m.T @ w
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return new
        v = v / nv
        if abs(new - estimate) <= tol * max(new, 1e-300):
            return new
        estimate = new
    warnings.warn(
        f"spectral_norm hit max_iter={max_iter} before reaching tol={tol}; "
        f"returning last estimate {estimate:.6g}",
        RuntimeWarning,
        stacklevel=2,
    )
    return estimate


def project_spectral_ball(w: np.ndarray) -> np.ndarray:
    """Euclidean projection of ``w`` onto the unit spectral-norm ball.

    Singular values are clipped at 1; inputs already inside the ball are
    returned unchanged (same object), which keeps no-op projections bit-exact.
    """
    w = np.asarray(w, dtype=np.float64)
    _require_finite(w, "matrix")
    try:
        u, s, vt = np.linalg.svd(w, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(
            f"SVD did not converge while projecting a {w.shape[0]}x{w.shape[1]} "
            "matrix onto the spectral ball",
            iterations=30 * min(w.shape),  # LAPACK's internal sweep budget
        ) from exc
    if s.size == 0 or s[0] <= 1.0:
        return w
    return (u * np.minimum(s, 1.0)) @ vt


def semi_orthogonal_init(rows: int, cols: int, seed: int) -> np.ndarray:
    """Seeded matrix with orthonormal columns (QR of a Gaussian draw).

    The R factor's diagonal signs are fixed so the result is a deterministic
    function of the seed. Requires ``cols <= rows``.
    """
    if cols > rows:
        raise ShapeError(
            f"semi-orthogonal init needs cols <= rows, got {rows}x{cols}",
            left=rows,
            right=cols,
        )
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((rows, cols))
    q, r = np.linalg.qr(g)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def validate_operator(a: sparse.csr_array, tol: float = 1e-12) -> None:
    """Check the sparse-operator contract: square, symmetric, nonnegative values.

    Raises ``ShapeError`` / ``ValueError`` on violation. Spectral bounds are
    intentionally not checked here; they cost a power iteration and callers
    check them on demand.
    """
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"operator must be square, got {a.shape}", left=a.shape)
    if a.nnz and a.data.min() < -tol:
        raise ValueError(f"operator has negative values (min {a.data.min():.3g})")
    diff = (a - a.T).tocoo()
    if diff.nnz and np.max(np.abs(diff.data)) > tol:
        raise ValueError("operator is not symmetric")
