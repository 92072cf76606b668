"""Heisenberg group primitives and truncated Schrodinger representations.

Exponential coordinates ``(x, y, z)`` on the group of step 2: the product is
polynomial (Baker-Campbell-Hausdorff truncates exactly), so the group layer
is exact up to floating point.  The representation layer lives on the first
``N`` L2-normalized Hermite functions per axis; ladder truncation corrupts
the last row/column of each axis factor, so results are trusted only on the
band of multi-indices with ``max(alpha) < N/2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm

__all__ = [
    "GroupElement",
    "TruncatedRep",
    "group_mul",
    "group_inverse",
    "identity_element",
    "dilate",
    "koranyi_norm",
    "schrodinger_generators",
    "rep_exponential",
    "rep_matrix",
    "displacement_matrix",
    "displacement_stack",
    "scale_rep",
    "hermite_position_matrix",
    "hermite_derivative_matrix",
    "hermite_samples",
    "safe_band_mask",
    "interior_mask",
    "outside_band_fraction",
    "multi_indices",
]

# maximal dense dimension for matrix exponentials; beyond this the
# truncated representation is only available through its sparse generators
_DENSE_CAP = 4096


# ---------------------------------------------------------------------------
# group layer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroupElement:
    """Point of the Heisenberg group H^d in exponential coordinates."""

    d: int
    x: tuple
    y: tuple
    z: float

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"d must be a positive integer, got {self.d}")
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))
        object.__setattr__(self, "z", float(self.z))
        if len(self.x) != self.d or len(self.y) != self.d:
            raise ValueError(
                f"coordinate tuples must have length d={self.d}, "
                f"got |x|={len(self.x)}, |y|={len(self.y)}"
            )

    @classmethod
    def from_coords(cls, x, y, z):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        return cls(d=len(x), x=tuple(x), y=tuple(y), z=float(z))


def identity_element(d: int) -> GroupElement:
    return GroupElement(d=d, x=(0.0,) * d, y=(0.0,) * d, z=0.0)


def group_mul(a: GroupElement, b: GroupElement) -> GroupElement:
    """BCH product: horizontal parts add, z picks up half the symplectic form."""
    if a.d != b.d:
        raise ValueError(f"dimension mismatch: {a.d} != {b.d}")
    ax, ay = np.asarray(a.x), np.asarray(a.y)
    bx, by = np.asarray(b.x), np.asarray(b.y)
    z = a.z + b.z + 0.5 * (float(ax @ by) - float(ay @ bx))
    return GroupElement(d=a.d, x=tuple(ax + bx), y=tuple(ay + by), z=z)


def group_inverse(g: GroupElement) -> GroupElement:
    return GroupElement(
        d=g.d,
        x=tuple(-v for v in g.x),
        y=tuple(-v for v in g.y),
        z=-g.z,
    )


def dilate(t: float, g: GroupElement) -> GroupElement:
    """Group automorphism (x, y, z) -> (t x, t y, t^2 z)."""
    if t <= 0:
        raise ValueError(f"dilation parameter must be positive, got {t}")
    return GroupElement(
        d=g.d,
        x=tuple(t * v for v in g.x),
        y=tuple(t * v for v in g.y),
        z=t * t * g.z,
    )


def koranyi_norm(g: GroupElement) -> float:
    """Koranyi quasinorm ((|x|^2+|y|^2)^2 + z^2)^(1/4); 1-homogeneous."""
    h = sum(v * v for v in g.x) + sum(v * v for v in g.y)
    return float((h * h + g.z * g.z) ** 0.25)


# ---------------------------------------------------------------------------
# Hermite ladder matrices
# ---------------------------------------------------------------------------

def hermite_position_matrix(N: int) -> np.ndarray:
    """Matrix of multiplication by xi on e_0..e_{N-1} (real symmetric).

    xi e_n = sqrt(n/2) e_{n-1} + sqrt((n+1)/2) e_{n+1}.
    """
    M = np.zeros((N, N))
    for n in range(1, N):
        M[n - 1, n] = M[n, n - 1] = np.sqrt(n / 2.0)
    return M


def hermite_derivative_matrix(N: int) -> np.ndarray:
    """Matrix of d/dxi on e_0..e_{N-1} (real antisymmetric).

    e_n' = sqrt(n/2) e_{n-1} - sqrt((n+1)/2) e_{n+1}.
    """
    D = np.zeros((N, N))
    for n in range(1, N):
        D[n - 1, n] = np.sqrt(n / 2.0)
        D[n, n - 1] = -np.sqrt(n / 2.0)
    return D


def hermite_samples(n: int, xi: np.ndarray) -> np.ndarray:
    """L2-normalized Hermite function e_n sampled at xi (stable recurrence)."""
    xi = np.asarray(xi, dtype=float)
    e_prev = np.pi ** (-0.25) * np.exp(-xi * xi / 2.0)
    if n == 0:
        return e_prev
    e_cur = np.sqrt(2.0) * xi * e_prev
    for k in range(1, n):
        e_next = np.sqrt(2.0 / (k + 1)) * xi * e_cur - np.sqrt(k / (k + 1)) * e_prev
        e_prev, e_cur = e_cur, e_next
    return e_cur


def multi_indices(d: int, N: int) -> np.ndarray:
    """All Hermite multi-indices as an (N^d, d) array, C-ordered.

    Row ordering matches the Kronecker convention used by the generators:
    axis 0 is the slowest index.
    """
    grids = np.meshgrid(*[np.arange(N)] * d, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def safe_band_mask(d: int, N: int) -> np.ndarray:
    """Boolean mask of multi-indices with max(alpha) < N/2 (trusted band)."""
    alpha = multi_indices(d, N)
    return alpha.max(axis=1) < N / 2


def interior_mask(d: int, N: int) -> np.ndarray:
    """Mask of multi-indices with every alpha_i < N-1 (exact commutators)."""
    alpha = multi_indices(d, N)
    return alpha.max(axis=1) < N - 1


def outside_band_fraction(mat: np.ndarray, d: int, N: int) -> float:
    """Fraction of Frobenius mass on rows/columns outside the safe band."""
    mask = safe_band_mask(d, N)
    total = np.linalg.norm(mat, "fro") ** 2
    if total == 0.0:
        return 0.0
    inner = mat[np.ix_(mask, mask)]
    return float(1.0 - np.linalg.norm(inner, "fro") ** 2 / total)


# ---------------------------------------------------------------------------
# truncated Schrodinger representation
# ---------------------------------------------------------------------------

def _kron_axis(op: np.ndarray, axis: int, d: int, N: int) -> sp.csr_matrix:
    factors = [sp.identity(N, format="csr")] * d
    factors[axis] = sp.csr_matrix(op)
    return reduce(lambda a, b: sp.kron(a, b, format="csr"), factors)


@dataclass
class TruncatedRep:
    """Infinitesimal Schrodinger representation pi^lambda on N^d Hermite modes.

    gen_X[i] = sqrt|lambda| * d/dxi_i, gen_Y[i] = i sgn(lambda) sqrt|lambda| xi_i,
    gen_R = i lambda.  The sign on gen_Y keeps the commutator contract
    [gen_X[i], gen_Y[j]] = delta_ij * (i lambda) on the interior block for
    both signs of lambda (the lambda>0 formula alone would give i|lambda|).
    """

    lam: float
    d: int
    N: int
    gen_X: list = field(repr=False)
    gen_Y: list = field(repr=False)
    basis_convention: str = "hermite-l2"

    @property
    def dim(self) -> int:
        return self.N ** self.d

    @property
    def gen_R(self) -> complex:
        return 1j * self.lam

    def generator_combination(self, g: GroupElement) -> sp.csr_matrix:
        """x . gen_X + y . gen_Y + z gen_R as a sparse matrix."""
        if g.d != self.d:
            raise ValueError(f"dimension mismatch: element d={g.d}, rep d={self.d}")
        acc = sp.csr_matrix((self.dim, self.dim), dtype=complex)
        for i in range(self.d):
            if g.x[i] != 0.0:
                acc = acc + g.x[i] * self.gen_X[i]
            if g.y[i] != 0.0:
                acc = acc + g.y[i] * self.gen_Y[i]
        if g.z != 0.0:
            acc = acc + (1j * self.lam * g.z) * sp.identity(self.dim, format="csr")
        return acc


def schrodinger_generators(lam: float, d: int, N: int) -> TruncatedRep:
    """Build the truncated generators of pi^lambda on N Hermite modes per axis."""
    if lam == 0.0:
        raise ValueError("lambda = 0 is a non-generic representation; rejected")
    if N < 4:
        raise ValueError(f"need N >= 4 Hermite modes, got {N}")
    s = np.sign(lam)
    root = np.sqrt(abs(lam))
    D1 = hermite_derivative_matrix(N)
    M1 = hermite_position_matrix(N)
    gen_X = [root * _kron_axis(D1, i, d, N).astype(complex) for i in range(d)]
    gen_Y = [(1j * s * root) * _kron_axis(M1, i, d, N) for i in range(d)]
    return TruncatedRep(lam=float(lam), d=d, N=N, gen_X=gen_X, gen_Y=gen_Y)


def rep_exponential(rep: TruncatedRep, g: GroupElement) -> np.ndarray:
    """Matrix exponential of the truncated generator combination.

    Unitary on the interior block only; for central g = (0,0,z) it is
    exp(i lambda z) times the identity exactly.  The result should be read
    on the safe band; use :func:`outside_band_fraction` to quantify leakage.
    """
    if rep.dim > _DENSE_CAP:
        raise ValueError(
            f"dense exponential refused for dimension {rep.dim} > {_DENSE_CAP}"
        )
    A = rep.generator_combination(g)
    return expm(A.toarray())


def _scaled_diagonal(u: np.ndarray, logb: np.ndarray, k: int, count: int):
    """Yield T_n = e^(-u/2) |b|^k sqrt(n!/(n+k)!) L_n^(k)(u) for n < count.

    These are the moduli of the displacement matrix elements on the k-th
    diagonal; all bounded by 1, so the recurrence never overflows.  The
    start value is assembled in log space for the same reason.
    """
    lfk = float(np.sum(np.log(np.arange(1, k + 1)))) if k else 0.0
    T_prev = np.zeros_like(u)
    with np.errstate(over="ignore"):
        T = np.exp(k * logb - 0.5 * lfk - 0.5 * u)
    for n in range(count):
        yield T
        r1 = np.sqrt((n + 1.0) / (n + 1.0 + k))
        r2 = np.sqrt((n + 1.0) * n / ((n + 1.0 + k) * (n + k))) if n else 0.0
        T_next = ((2 * n + k + 1 - u) * r1 * T - (n + k) * r2 * T_prev) / (n + 1.0)
        T_prev, T = T, T_next


def displacement_stack(betas: np.ndarray, N: int) -> np.ndarray:
    """Matrices <m| exp(beta a^+ - conj(beta) a) |n>, shape betas.shape+(N,N).

    Exact (untruncated) coherent-displacement matrix elements: for m >= n,
    sqrt(n!/m!) beta^(m-n) e^(-|beta|^2/2) L_n^(m-n)(|beta|^2), and the
    m < n block follows by the adjoint relation with -conj(beta).
    """
    betas = np.asarray(betas, dtype=complex)
    b = betas.ravel()
    absb = np.abs(b)
    u = absb ** 2
    with np.errstate(divide="ignore"):
        logb = np.where(absb > 0, np.log(np.maximum(absb, 1e-300)), -np.inf)
    phase = np.where(absb > 0, b / np.where(absb > 0, absb, 1.0), 1.0)
    out = np.zeros((b.size, N, N), dtype=complex)
    for k in range(N):
        ph = phase ** k
        sgn = (-1.0) ** k
        for n, T in enumerate(_scaled_diagonal(u, logb, k, N - k)):
            val = ph * T
            out[:, n + k, n] = val
            if k:
                out[:, n, n + k] = sgn * np.conj(val)
    return out.reshape(betas.shape + (N, N))


def displacement_matrix(N: int, beta: complex) -> np.ndarray:
    """Single displacement matrix; see :func:`displacement_stack`."""
    return displacement_stack(np.array([beta]), N)[0]


def rep_matrix(lam: float, d: int, N: int, g: GroupElement) -> np.ndarray:
    """Closed-form matrix of pi^lambda(g) on the Hermite basis.

    pi^lambda(Exp(x.X + y.Y + z R)) = e^(i lambda z) * prod_i D(beta_i) with
    beta_i = -sqrt(|lambda|/2) (x_i - i sgn(lambda) y_i).  Exact matrix
    elements of the untruncated operator; agrees with
    :func:`rep_exponential` on the safe band.
    """
    if lam == 0.0:
        raise ValueError("lambda = 0 rejected")
    if g.d != d:
        raise ValueError(f"dimension mismatch: element d={g.d}, requested d={d}")
    s = np.sign(lam)
    scale = np.sqrt(abs(lam) / 2.0)
    blocks = [
        displacement_matrix(N, -scale * (g.x[i] - 1j * s * g.y[i]))
        for i in range(d)
    ]
    out = reduce(np.kron, blocks)
    return np.exp(1j * lam * g.z) * out


def scale_rep(lam: float, hbar: float) -> float:
    """Central character of pi^lambda composed with the dilation delta_hbar."""
    if hbar <= 0:
        raise ValueError(f"hbar must be positive, got {hbar}")
    return hbar * hbar * lam
