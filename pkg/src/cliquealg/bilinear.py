"""Coefficient-level descriptions of rank-t matrix-multiplication algorithms.

An algorithm for multiplying a d x e block matrix by an e x d block matrix is
given by coefficient tables alpha, beta, lambda: the t scalar products are

    S_mu = sum_ij alpha[mu,i,j] * A[i,j]      T_mu = sum_ij beta[mu,i,j] * B[j,i]
    C[i,j] = sum_mu lambda[mu,i,j] * S_mu * T_mu

with everything lifting verbatim to blocks.  Coefficients are small signed
integers, reduced mod p at the point of use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ff import matmul_mod


@dataclass(frozen=True)
class BilinearAlgorithm:
    d: int          # outer dimension
    e: int          # inner dimension
    t: int          # rank
    alpha: np.ndarray   # (t, d, e)
    beta: np.ndarray    # (t, d, e)  — beta[mu,i,j] multiplies B[j,i]
    lam: np.ndarray     # (t, d, d)

    def __post_init__(self):
        assert self.alpha.shape == (self.t, self.d, self.e)
        assert self.beta.shape == (self.t, self.d, self.e)
        assert self.lam.shape == (self.t, self.d, self.d)


def trivial_algorithm(d: int, e: int) -> BilinearAlgorithm:
    """The rank d*d*e schoolbook algorithm; valid over any semiring."""
    if d < 1 or e < 1:
        raise ValueError("dimensions must be positive")
    t = d * d * e
    alpha = np.zeros((t, d, e), dtype=np.int64)
    beta = np.zeros((t, d, e), dtype=np.int64)
    lam = np.zeros((t, d, d), dtype=np.int64)
    mu = 0
    for i in range(d):
        for j in range(d):
            for s in range(e):
                alpha[mu, i, s] = 1
                beta[mu, j, s] = 1
                lam[mu, i, j] = 1
                mu += 1
    return BilinearAlgorithm(d, e, t, alpha, beta, lam)


def strassen() -> BilinearAlgorithm:
    """The classical rank-7 algorithm for 2x2 blocks."""
    alpha = np.zeros((7, 2, 2), dtype=np.int64)
    beta = np.zeros((7, 2, 2), dtype=np.int64)
    lam = np.zeros((7, 2, 2), dtype=np.int64)
    # products: S_mu from A, T_mu from B (beta[mu,i,j] multiplies B[j,i])
    alpha[0, 0, 0] = alpha[0, 1, 1] = 1          # A11+A22
    beta[0, 0, 0] = beta[0, 1, 1] = 1            # B11+B22
    alpha[1, 1, 0] = alpha[1, 1, 1] = 1          # A21+A22
    beta[1, 0, 0] = 1                            # B11
    alpha[2, 0, 0] = 1                           # A11
    beta[2, 1, 0] = 1                            # B12
    beta[2, 1, 1] = -1                           # -B22
    alpha[3, 1, 1] = 1                           # A22
    beta[3, 0, 1] = 1                            # B21
    beta[3, 0, 0] = -1                           # -B11
    alpha[4, 0, 0] = alpha[4, 0, 1] = 1          # A11+A12
    beta[4, 1, 1] = 1                            # B22
    alpha[5, 1, 0] = 1                           # A21
    alpha[5, 0, 0] = -1                          # -A11
    beta[5, 0, 0] = 1                            # B11
    beta[5, 1, 0] = 1                            # B12
    alpha[6, 0, 1] = 1                           # A12
    alpha[6, 1, 1] = -1                          # -A22
    beta[6, 0, 1] = 1                            # B21
    beta[6, 1, 1] = 1                            # B22
    lam[0, 0, 0] = lam[3, 0, 0] = 1
    lam[4, 0, 0] = -1
    lam[6, 0, 0] = 1
    lam[2, 0, 1] = lam[4, 0, 1] = 1
    lam[1, 1, 0] = lam[3, 1, 0] = 1
    lam[0, 1, 1] = 1
    lam[1, 1, 1] = -1
    lam[2, 1, 1] = lam[5, 1, 1] = 1
    return BilinearAlgorithm(2, 2, 7, alpha, beta, lam)


def tensor_power(alg: BilinearAlgorithm, k: int) -> BilinearAlgorithm:
    """k-fold Kronecker power; rank multiplies, dimensions exponentiate."""
    if k < 0:
        raise ValueError("power must be nonnegative")
    out = trivial_algorithm(1, 1)
    for _ in range(k):
        out = _tensor(out, alg)
    return out


def _tensor(a: BilinearAlgorithm, b: BilinearAlgorithm) -> BilinearAlgorithm:
    def kron(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        t1, d1, e1 = x.shape
        t2, d2, e2 = y.shape
        out = np.einsum("mij,nkl->mnikjl", x, y)
        return out.reshape(t1 * t2, d1 * d2, e1 * e2)

    return BilinearAlgorithm(
        a.d * b.d, a.e * b.e, a.t * b.t,
        kron(a.alpha, b.alpha), kron(a.beta, b.beta), kron(a.lam, b.lam),
    )


def inner_dim(d: int, gamma: float) -> int:
    """ceil(d**gamma) with guard against float fuzz at integer powers.

    The slack absorbs the gamma-solver's bisection tolerance; genuine
    fractional powers at feasible d are never within 1e-6 of an integer.
    """
    if d == 1:
        return 1
    return max(1, math.ceil(d ** gamma - 1e-6))


def rank_of(family: str, d: int, gamma: float) -> int:
    if family == "trivial":
        return d * d * inner_dim(d, gamma)
    if family == "strassen":
        if d == 1:
            return 1
        j = int(round(math.log2(d)))
        if 2 ** j != d:
            raise ValueError("strassen powers exist only for d a power of two")
        return 7 ** j
    raise ValueError(f"unknown kernel family {family!r}")


def max_d_for_budget(family: str, budget: int, gamma: float) -> int:
    """Largest d whose (d, ceil(d**gamma)) algorithm has rank <= budget."""
    if budget < 1:
        raise ValueError("budget must be positive")
    if family == "strassen":
        if abs(gamma - 1.0) > 1e-9:
            raise ValueError("strassen powers support gamma = 1 only")
        j = 0
        while 7 ** (j + 1) <= budget:
            j += 1
        return 2 ** j
    d = 1
    while rank_of(family, d + 1, gamma) <= budget:
        d += 1
    return d


def algorithm_for(family: str, d: int, gamma: float) -> BilinearAlgorithm:
    if family == "trivial":
        return trivial_algorithm(d, inner_dim(d, gamma))
    if family == "strassen":
        j = 0 if d == 1 else int(round(math.log2(d)))
        if 2 ** j != d:
            raise ValueError("strassen powers exist only for d a power of two")
        return tensor_power(strassen(), j)
    raise ValueError(f"unknown kernel family {family!r}")


def apply_algorithm(alg: BilinearAlgorithm, a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Evaluate the coefficient identity directly on scalar matrices (for checks)."""
    if a.shape != (alg.d, alg.e) or b.shape != (alg.e, alg.d):
        raise ValueError("shape mismatch with the algorithm dimensions")
    alpha = alg.alpha % p
    beta = alg.beta % p
    lam = alg.lam % p
    s = np.einsum("mij,ij->m", alpha, a % p) % p
    t = np.einsum("mij,ji->m", beta, b % p) % p
    prods = s * t % p
    return np.einsum("mij,m->ij", lam, prods) % p


def verify_identity(alg: BilinearAlgorithm, p: int = 101, trials: int = 50,
                    rng=None, exhaustive_limit: int = 16) -> bool:
    """Check the identity on basis pairs (small d*e) or random matrices."""
    if alg.d * alg.e <= exhaustive_limit:
        for a_pos in range(alg.d * alg.e):
            for b_pos in range(alg.e * alg.d):
                a = np.zeros((alg.d, alg.e), dtype=np.int64)
                b = np.zeros((alg.e, alg.d), dtype=np.int64)
                a[a_pos // alg.e, a_pos % alg.e] = 1
                b[b_pos // alg.d, b_pos % alg.d] = 1
                if not np.array_equal(apply_algorithm(alg, a, b, p),
                                      matmul_mod(a, b, p)):
                    return False
        return True
    import random as _random
    rng = rng or _random.Random(0)
    for _ in range(trials):
        a = np.array([[rng.randrange(p) for _ in range(alg.e)] for _ in range(alg.d)],
                     dtype=np.int64)
        b = np.array([[rng.randrange(p) for _ in range(alg.d)] for _ in range(alg.e)],
                     dtype=np.int64)
        if not np.array_equal(apply_algorithm(alg, a, b, p), matmul_mod(a, b, p)):
            return False
    return True
