"""Linear algebra of Dirac structures on a finite-dimensional vector space.

A Dirac structure on V is a maximal isotropic subspace L of V + V* for the
pairing <(x,xi),(y,eta)> = xi(y) + eta(x).  Subspaces are stored as
canonicalized spanning matrices so equality is plain entrywise comparison.
"""

from dataclasses import dataclass, field

import numpy as np

DEFAULT_TOL = 1e-9


class DegenerateRankError(ValueError):
    """Numerical rank of a pushed/pulled subspace is not the expected one."""


class NonSmoothPullbackError(DegenerateRankError):
    """Pull-back candidate subspace has the wrong dimension at this point."""


# -- subspace utilities ---------------------------------------------------

def orth_basis(M, tol=DEFAULT_TOL):
    """Orthonormal basis of the column span, rank decided at tol relative."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0 or M.shape[1] == 0:
        return np.zeros((M.shape[0], 0))
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((M.shape[0], 0))
    r = int(np.sum(s > tol * s[0]))
    return U[:, :r]


def null_basis(M, tol=DEFAULT_TOL):
    """Orthonormal basis of the kernel of M (rows = constraints)."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    m, n = M.shape
    if n == 0:
        return np.zeros((0, 0))
    U, s, Vt = np.linalg.svd(M)
    if s.size == 0 or s[0] == 0.0:
        return np.eye(n)
    r = int(np.sum(s > tol * s[0]))
    return Vt[r:].T


def rref(M, tol=DEFAULT_TOL):
    """Reduced row echelon form with partial pivoting; pivots normalized to 1."""
    A = np.array(M, dtype=float)
    m, n = A.shape
    scale = max(1.0, np.abs(A).max()) if A.size else 1.0
    row = 0
    for col in range(n):
        if row >= m:
            break
        piv = row + int(np.argmax(np.abs(A[row:, col])))
        if abs(A[piv, col]) <= tol * scale:
            continue
        A[[row, piv]] = A[[piv, row]]
        A[row] = A[row] / A[row, col]
        for r in range(m):
            if r != row:
                A[r] = A[r] - A[r, col] * A[row]
        row += 1
    return A[:row]


def canonical_span(M, tol=DEFAULT_TOL):
    """Canonical matrix representing the column span of M.

    Column-pivoted QR (via SVD orthonormalization, which shares the same
    determinism goal) followed by RREF of the transpose: the result depends
    only on the subspace, so two spans compare by entrywise equality.
    """
    B = orth_basis(M, tol)
    return rref(B.T, tol)


def spans_equal(A, B, tol=DEFAULT_TOL):
    CA = canonical_span(A, tol)
    CB = canonical_span(B, tol)
    if CA.shape != CB.shape:
        return False
    return bool(np.max(np.abs(CA - CB), initial=0.0) <= 1e-9)


def intersect_spans(A, B, tol=DEFAULT_TOL):
    """Basis of (col span A) ∩ (col span B)."""
    A = orth_basis(A, tol)
    B = orth_basis(B, tol)
    if A.shape[1] == 0 or B.shape[1] == 0:
        return np.zeros((A.shape[0], 0))
    K = null_basis(np.hstack([A, -B]), tol)
    return orth_basis(A @ K[: A.shape[1]], tol)


def subspace_contained(A, B, tol=1e-8):
    """Is col span A contained in col span B (residual test)?"""
    A = orth_basis(A)
    B = orth_basis(B)
    if A.shape[1] == 0:
        return True
    P = B @ B.T
    return bool(np.max(np.abs(A - P @ A)) <= tol)


# -- pairing and Dirac structures ----------------------------------------

@dataclass(frozen=True)
class PairedVector:
    x: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "xi", np.asarray(self.xi, dtype=float))
        if self.x.shape != self.xi.shape:
            raise ValueError("vector and covector dimensions disagree")


def pairing(a, b):
    """<(x,xi),(y,eta)> = xi(y) + eta(x)."""
    if a.x.shape != b.x.shape:
        raise ValueError("dimension mismatch")
    return float(a.xi @ b.x + b.xi @ a.x)


def _pairing_matrix(n):
    P = np.zeros((2 * n, 2 * n))
    P[:n, n:] = np.eye(n)
    P[n:, :n] = np.eye(n)
    return P


@dataclass(frozen=True)
class LinearDirac:
    """Maximal isotropic subspace of V + V*, canonicalized."""

    dim: int
    span: np.ndarray
    canonical: np.ndarray = field(compare=False)
    tol: float = field(default=DEFAULT_TOL, compare=False)

    @staticmethod
    def from_span(span, tol=DEFAULT_TOL, check=True):
        span = np.asarray(span, dtype=float)
        if span.ndim != 2 or span.shape[0] % 2 != 0:
            raise ValueError("span must be a 2n x k matrix")
        n = span.shape[0] // 2
        B = orth_basis(span, tol)
        if check:
            if B.shape[1] != n:
                raise DegenerateRankError(
                    f"span has rank {B.shape[1]}, expected {n}")
            P = _pairing_matrix(n)
            iso = np.max(np.abs(B.T @ P @ B))
            if iso > 1e-7:
                raise ValueError(f"span is not isotropic (residual {iso:.2e})")
        return LinearDirac(n, span, canonical_span(span, tol), tol)

    def __eq__(self, other):
        if not isinstance(other, LinearDirac) or self.dim != other.dim:
            return NotImplemented if not isinstance(other, LinearDirac) else False
        if self.canonical.shape != other.canonical.shape:
            return False
        return bool(np.max(np.abs(self.canonical - other.canonical),
                           initial=0.0) <= 1e-9)

    def __hash__(self):
        return hash((self.dim, self.canonical.shape))

    def contains(self, x, xi, tol=1e-8):
        """Membership test for (x, xi) via vanishing pairing against L."""
        n = self.dim
        v = np.concatenate([np.asarray(x, float), np.asarray(xi, float)])
        B = orth_basis(self.span, self.tol)
        P = _pairing_matrix(n)
        return bool(np.max(np.abs(B.T @ P @ v), initial=0.0) <= tol)

    def to_json(self):
        return {"dim": self.dim,
                "span": [list(map(float, row)) for row in self.span],
                "tol": self.tol}


def _check_skew(M, what, tol=1e-9):
    M = np.asarray(M, dtype=float)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"{what} must be square")
    scale = max(1.0, np.abs(M).max())
    if np.max(np.abs(M + M.T)) > tol * scale:
        raise ValueError(f"{what} must be skew-symmetric")
    return M


def from_form(theta, tol=DEFAULT_TOL):
    """Graph of the 2-form theta: L = {(x, theta(x, .))}."""
    theta = _check_skew(theta, "theta")
    n = theta.shape[0]
    # column j is (e_j, theta(e_j, .)); theta(e_j, e_i) = theta[j, i]
    return LinearDirac.from_span(np.vstack([np.eye(n), theta.T]), tol)


def from_bivector(pi, tol=DEFAULT_TOL):
    """Graph of the bivector pi over V*: L = {(pi~(alpha), alpha)},
    with pi~(alpha)(beta) = pi(beta, alpha)."""
    pi = _check_skew(pi, "pi")
    n = pi.shape[0]
    # column j is (pi~(e_j*), e_j*); pi~(e_j*)_i = pi(e_i, e_j) = pi[i, j]
    return LinearDirac.from_span(np.vstack([pi, np.eye(n)]), tol)


@dataclass(frozen=True)
class InducedData:
    range: np.ndarray   # basis of pr1(L)
    kernel: np.ndarray  # basis of {v : (v, 0) in L}
    theta: np.ndarray   # theta_L on V, supported on the range
    pi: np.ndarray      # induced bivector on V (descends to V/Ker)


def _membership_solve(L, v):
    """Find xi with (v, xi) in L; v must lie in pr1(L)."""
    n = L.dim
    B = orth_basis(L.span, L.tol)
    top = B[:n]
    c, res, *_ = np.linalg.lstsq(top, np.asarray(v, float), rcond=None)
    return B[n:] @ c


def _comembership_solve(L, xi):
    """Find x with (x, xi) in L; xi must lie in pr2(L)."""
    n = L.dim
    B = orth_basis(L.span, L.tol)
    bot = B[n:]
    c, *_ = np.linalg.lstsq(bot, np.asarray(xi, float), rcond=None)
    return B[:n] @ c


def induced(L):
    """Range, kernel, and the induced 2-form / bivector of L."""
    n = L.dim
    B = orth_basis(L.span, L.tol)
    rng = orth_basis(B[:n], L.tol)
    # kernel: x-parts of elements with vanishing covector part
    K = null_basis(B[n:], L.tol)
    ker = orth_basis(B[:n] @ K, L.tol)
    # theta on the range, extended by the orthogonal projection onto it
    P = rng @ rng.T
    theta = np.zeros((n, n))
    xis = [_membership_solve(L, P[:, i]) for i in range(n)]
    for i in range(n):
        for j in range(n):
            theta[i, j] = xis[i] @ P[:, j]
    theta = 0.5 * (theta - theta.T)
    # pi on pr2(L), extended by projection
    rng2 = orth_basis(B[n:], L.tol)
    P2 = rng2 @ rng2.T
    xs = [_comembership_solve(L, P2[:, j]) for j in range(n)]
    pi = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            # pi(e_i*, e_j*) with (x_j, e_j*) in L: pi~(e_j*) = x_j,
            # pi(e_i*, e_j*) = pi~(e_j*)(e_i*)... = e_i* (x_j)
            pi[i, j] = xs[j][i]
    pi = 0.5 * (pi - pi.T)
    return InducedData(rng, ker, theta, pi)


def push_forward(psi, L, tol=None):
    """Forward image F_psi(L) = {(psi x, eta) : (x, psi* eta) in L}."""
    tol = L.tol if tol is None else tol
    psi = np.atleast_2d(np.asarray(psi, dtype=float))
    m, n = psi.shape
    if n != L.dim:
        raise ValueError("psi domain dimension mismatch")
    B = orth_basis(L.span, tol)
    # constraints: for every basis column (a, alpha) of L,
    # alpha(x) + eta(psi a) = 0  -- unknowns (x, eta) in R^{n+m}
    A = B[:n]
    Al = B[n:]
    C = np.hstack([Al.T, (psi @ A).T])  # n rows (one per basis column)
    K = null_basis(C, tol)
    out = np.vstack([psi @ K[:n], K[n:]])
    Bout = orth_basis(out, tol)
    if Bout.shape[1] != m:
        raise DegenerateRankError(
            f"push-forward rank {Bout.shape[1]} != {m} (discontinuity point)")
    return LinearDirac.from_span(out, tol)


def pull_back(f, L, tol=None):
    """Backward image f*L = {(X, f* xi) : (f X, xi) in L} on the source."""
    tol = L.tol if tol is None else tol
    f = np.atleast_2d(np.asarray(f, dtype=float))
    m, n = f.shape  # f: R^n -> R^m, L lives on R^m
    if m != L.dim:
        raise ValueError("f codomain dimension mismatch")
    B = orth_basis(L.span, tol)
    A = B[:m]
    Al = B[m:]
    # constraints: for basis (b, beta) of L: xi(b) + beta(f X) = 0
    C = np.hstack([(Al.T @ f), A.T])  # unknowns (X, xi) in R^{n+m}
    K = null_basis(C, tol)
    out = np.vstack([K[:n], f.T @ K[n:]])
    Bout = orth_basis(out, tol)
    if Bout.shape[1] != n:
        raise NonSmoothPullbackError(
            f"pull-back rank {Bout.shape[1]} != {n} (non-smooth pull-back point)")
    return LinearDirac.from_span(out, tol)


def is_dirac_map(psi, L_V, L_W):
    """True iff the forward image of L_V under psi equals L_W."""
    return push_forward(psi, L_V) == L_W


# -- metric identification -----------------------------------------------

def lower_index(g, v):
    """v-flat: the covector g(v, .)."""
    return np.asarray(g, float) @ np.asarray(v, float)


def raise_index(g, xi):
    """xi-sharp w.r.t. the inner product g."""
    return np.linalg.solve(np.asarray(g, float), np.asarray(xi, float))
