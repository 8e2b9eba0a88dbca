"""Two-community stochastic block models and their exact expected operator.

Sampling is deterministic per seed. Small graphs (n <= 5000) draw one uniform
per node pair; larger graphs use geometric jumps between successful pairs,
which follows the same edge distribution at O(edges) cost. The two paths
consume the seed differently, so the realized graph depends on which one ran,
but the law is identical.

The expected normalized adjacency of the model is an explicit rank-2 block
matrix; it is applied lazily through two community sums and never built dense
except in tests.
"""

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import ConvergenceError, ShapeError
from .graph_ops import Graph

_DEVIATION_SEED = 0xD1FF


@dataclass(frozen=True)
class SbmSpec:
    """Block-model parameters: community sizes, intra probability p, q = tau * p."""

    n1: int
    n2: int
    p: float
    tau: float
    seed: int = 0

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError("community sizes must be >= 1")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.tau < 0 or self.tau * self.p > 1.0 + 1e-12:
            raise ValueError(f"q = tau*p must lie in [0, 1], got {self.tau * self.p}")

    @property
    def q(self) -> float:
        return self.tau * self.p

    @property
    def n(self) -> int:
        return self.n1 + self.n2


@dataclass(frozen=True)
class CommunityFeatureSpec:
    """Per-community Gaussian feature law: shared width, means and scalar stds."""

    dim: int
    mean1: float | np.ndarray = 0.0
    mean2: float | np.ndarray = 0.0
    std1: float = 1.0
    std2: float = 1.0

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("feature dimension must be >= 1")
        if self.std1 < 0 or self.std2 < 0:
            raise ValueError("stds must be nonnegative")

    def mean_vector(self, community: int) -> np.ndarray:
        mu = self.mean1 if community == 1 else self.mean2
        return np.broadcast_to(np.asarray(mu, dtype=np.float64), (self.dim,)).copy()

    def std(self, community: int) -> float:
        return self.std1 if community == 1 else self.std2

    def total_variance(self, n1: int, n2: int) -> float:
        """E||X||^2 - ||EX||^2 for a stacked (n1+n2)-row sample."""
        return self.dim * (n1 * self.std1**2 + n2 * self.std2**2)


# threshold between the dense-Bernoulli and geometric-skip samplers
_BERNOULLI_LIMIT = 5000


def _pairs_from_triu(idx: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray]:
    # invert the row-major linear index over the strict upper triangle of an
    # m x m block: row i owns (m-1-i) slots starting at i*m - i(i+1)/2 - i
    idx = idx.astype(np.float64)
    b = 2 * m - 1
    i = np.floor((b - np.sqrt(b * b - 8 * idx)) / 2).astype(np.int64)
    start = i * (2 * m - i - 1) // 2
    # float sqrt can be off by one near block boundaries
    over = start > idx
    i[over] -= 1
    start = i * (2 * m - i - 1) // 2
    under = idx >= start + (m - 1 - i)
    i[under] += 1
    start = i * (2 * m - i - 1) // 2
    j = (idx - start).astype(np.int64) + i + 1
    return i, j


def _skip_sample(total: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Indices of successes among `total` Bernoulli(p) slots via geometric jumps."""
    if p <= 0.0 or total == 0:
        return np.empty(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(total, dtype=np.int64)
    out = []
    pos = -1
    expected = int(total * p * 1.1) + 16
    while pos < total:
        jumps = rng.geometric(p, size=expected)
        pts = pos + np.cumsum(jumps)
        inside = pts[pts < total]
        out.append(inside)
        if inside.size < pts.size:
            break
        pos = int(pts[-1])
    return np.concatenate(out) if out else np.empty(0, dtype=np.int64)


def sample_sbm(spec: SbmSpec) -> Graph:
    """Sample the model: nodes 0..n1-1 are community 1, the rest community 2.

    Draw order is intra-community-1, intra-community-2, then inter-community,
    all from one generator seeded with ``spec.seed``.
    """
    rng = np.random.default_rng(spec.seed)
    n1, n2, p, q = spec.n1, spec.n2, spec.p, spec.q
    parts = []

    def triu_block(m: int, offset: int, prob: float):
        total = m * (m - 1) // 2
        if total == 0 or prob == 0.0:
            return
        if spec.n <= _BERNOULLI_LIMIT:
            hits = np.nonzero(rng.random(total) < prob)[0]
        else:
            hits = _skip_sample(total, prob, rng)
        if hits.size:
            i, j = _pairs_from_triu(hits, m)
            parts.append(np.column_stack([i + offset, j + offset]))

    triu_block(n1, 0, p)
    triu_block(n2, n1, p)
    total = n1 * n2
    if total and q > 0.0:
        if spec.n <= _BERNOULLI_LIMIT:
            hits = np.nonzero(rng.random(total) < q)[0]
        else:
            hits = _skip_sample(total, q, rng)
        if hits.size:
            i = hits // n2
            j = hits % n2 + n1
            parts.append(np.column_stack([i, j]))

    if parts:
        edges = np.concatenate(parts).astype(np.int64)
        order = np.lexsort((edges[:, 1], edges[:, 0]))
        edges = edges[order]
    else:
        edges = np.empty((0, 2), dtype=np.int64)
    return Graph(spec.n, edges)


def sample_features(
    spec: CommunityFeatureSpec, n1: int, n2: int, seed: int
) -> np.ndarray:
    """(n1+n2) x dim matrix with i.i.d. Gaussian rows per community."""
    rng = np.random.default_rng(seed)
    x = np.empty((n1 + n2, spec.dim), dtype=np.float64)
    x[:n1] = spec.mean_vector(1) + spec.std1 * rng.standard_normal((n1, spec.dim))
    x[n1:] = spec.mean_vector(2) + spec.std2 * rng.standard_normal((n2, spec.dim))
    return x


@dataclass(frozen=True)
class ExpectedOperator:
    """The model's expected normalized adjacency, applied lazily.

    Block values: intra/inter entries divided by the expected row mass of the
    owning community; rows sum to exactly 1 by construction.
    """

    n1: int
    n2: int
    p: float
    q: float

    def __post_init__(self):
        if self.n1 * self.p + self.n2 * self.q <= 0:
            raise ValueError("zero normalizer for community-1 rows")
        if self.n1 * self.q + self.n2 * self.p <= 0:
            raise ValueError("zero normalizer for community-2 rows")

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    @property
    def blocks(self) -> tuple[float, float, float, float]:
        z1 = self.n1 * self.p + self.n2 * self.q
        z2 = self.n1 * self.q + self.n2 * self.p
        return (self.p / z1, self.q / z1, self.q / z2, self.p / z2)

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Matrix product with x at O(n * width) cost via two community sums."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape[0] != self.n:
            raise ShapeError(
                f"expected operator is {self.n}x{self.n} but matrix has "
                f"{x.shape[0]} rows",
                left=(self.n, self.n),
                right=x.shape,
            )
        a11, a12, a21, a22 = self.blocks
        s1 = x[: self.n1].sum(axis=0)
        s2 = x[self.n1 :].sum(axis=0)
        out = np.empty_like(x)
        out[: self.n1] = a11 * s1 + a12 * s2
        out[self.n1 :] = a21 * s1 + a22 * s2
        return out

    def apply_transpose(self, x: np.ndarray) -> np.ndarray:
        a11, a12, a21, a22 = self.blocks
        s1 = x[: self.n1].sum(axis=0)
        s2 = x[self.n1 :].sum(axis=0)
        out = np.empty_like(np.asarray(x, dtype=np.float64))
        out[: self.n1] = a11 * s1 + a21 * s2
        out[self.n1 :] = a12 * s1 + a22 * s2
        return out

    def dense(self) -> np.ndarray:
        """Materialized matrix; test oracle only, O(n^2) memory."""
        a11, a12, a21, a22 = self.blocks
        out = np.empty((self.n, self.n))
        out[: self.n1, : self.n1] = a11
        out[: self.n1, self.n1 :] = a12
        out[self.n1 :, : self.n1] = a21
        out[self.n1 :, self.n1 :] = a22
        return out


def expected_normalized_adjacency(
    n1: int, n2: int, p: float, q: float
) -> ExpectedOperator:
    return ExpectedOperator(n1, n2, p, q)


def operator_deviation(
    a: sparse.csr_array,
    e: ExpectedOperator,
    tol: float = 1e-6,
    max_iter: int = 5000,
) -> float:
    """Spectral norm of ``a - e`` by power iteration on the lazy difference.

    Iterates on D^T D where D v = a v - e.apply(v); neither the difference nor
    the expected operator is ever materialized.
    """
    n = a.shape[0]
    if n != e.n:
        raise ShapeError(
            f"operator sizes differ: {n} vs {e.n}", left=a.shape, right=(e.n, e.n)
        )
    rng = np.random.default_rng(_DEVIATION_SEED)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    estimate = 0.0
    for it in range(1, max_iter + 1):
        dv = a @ v - e.apply(v)
        new = float(np.linalg.norm(dv))
        if new == 0.0:
            return 0.0
        w = a @ dv - e.apply_transpose(dv)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return new
        v = w / nw
        if abs(new - estimate) <= tol * max(new, 1e-300):
            return new
        estimate = new
    raise ConvergenceError(
        f"operator deviation power iteration did not reach tol={tol} in "
        f"{max_iter} iterations (last estimate {estimate:.6g})",
        iterations=max_iter,
    )
