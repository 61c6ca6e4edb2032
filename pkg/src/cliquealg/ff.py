"""Prime-field arithmetic, prime search, and the discrete Fourier transform mod p.

Everything here is node-local math: scalar field elements, polynomials with
coefficients mod p, naive-quadratic DFT/IDFT for small transform lengths, and
Berlekamp-Massey recovery of the minimal linear recurrence of a sequence.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

# Search limit for prime hunting; one machine word with headroom for squaring.
WORD_BOUND = 1 << 62

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class InvalidOrderError(ValueError):
    pass


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for all word-sized integers."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime_at_least(lower_bound: int) -> int:
    p = max(2, lower_bound)
    while not is_prime(p):
        p += 1
        if p > WORD_BOUND:
            raise OverflowError("prime search exceeded the machine-word bound")
    return p


def least_prime_congruent(n_param: int, lower_bound: int) -> int:
    """Least prime p >= lower_bound with p congruent to 1 mod 2*n_param."""
    if n_param < 1 or lower_bound < 2:
        raise ValueError("need n_param >= 1 and lower_bound >= 2")
    step = 2 * n_param
    p = lower_bound + (1 - lower_bound) % step
    while True:
        if p > WORD_BOUND:
            raise OverflowError(
                f"no prime = 1 (mod {step}) below the machine-word bound {WORD_BOUND}"
            )
        if p >= 2 and is_prime(p):
            return p
        p += step


class PrimeField:
    """GF(p) for a word-sized prime p. Immutable; shareable across threads."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if p > WORD_BOUND:
            raise ValueError(f"{p} exceeds the machine-word bound")
        self.p = p

    def element(self, value: int) -> "FieldElement":
        return FieldElement(value % self.p, self)

    def zero(self) -> "FieldElement":
        return FieldElement(0, self)

    def one(self) -> "FieldElement":
        return FieldElement(1 % self.p, self)

    def inv(self, value: int) -> int:
        if value % self.p == 0:
            raise ZeroDivisionError("inverse of zero field element")
        return pow(value, -1, self.p)

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        return np.mod(arr, self.p)

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("PrimeField", self.p))

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"


class FieldElement:
    """A value in [0, p) attached to its field."""

    __slots__ = ("value", "field")

    def __init__(self, value: int, field: PrimeField):
        self.value = value % field.p
        self.field = field

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field.p != self.field.p:
                raise ValueError("field mismatch")
            return other.value
        return int(other) % self.field.p

    def __add__(self, other):
        return FieldElement(self.value + self._coerce(other), self.field)

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.value - self._coerce(other), self.field)

    def __rsub__(self, other):
        return FieldElement(self._coerce(other) - self.value, self.field)

    def __mul__(self, other):
        return FieldElement(self.value * self._coerce(other), self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.field)

    def __truediv__(self, other):
        return self * FieldElement(self._coerce(other), self.field).inverse()

    def __pow__(self, exponent: int):
        return FieldElement(pow(self.value, exponent, self.field.p), self.field)

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field.inv(self.value), self.field)

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.field.p == other.field.p and self.value == other.value
        return self.value == int(other) % self.field.p

    def __hash__(self) -> int:
        return hash((self.value, self.field.p))

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"FieldElement({self.value} mod {self.field.p})"


def _prime_factors(n: int) -> list[int]:
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def primitive_root_of_unity(field: PrimeField, order: int) -> FieldElement:
    """An element of multiplicative order exactly `order` in GF(p).

    Requires order | p - 1; search is deterministic (smallest base first).
    """
    p = field.p
    if order < 1:
        raise InvalidOrderError("order must be positive")
    if order == 1:
        return field.one()
    if (p - 1) % order != 0:
        raise InvalidOrderError(f"{order} does not divide p-1 = {p - 1}")
    factors = _prime_factors(order)
    for g in range(2, p):
        cand = pow(g, (p - 1) // order, p)
        if cand == 1:
            continue
        if all(pow(cand, order // q, p) != 1 for q in factors):
            return FieldElement(cand, field)
    raise InvalidOrderError(f"no element of order {order} found in GF({p})")


def _as_int_array(values: Sequence, p: int) -> np.ndarray:
    return np.array([int(v) % p for v in values], dtype=np.int64)


def _omega_value(omega, p: int) -> int:
    return int(omega) % p


def dft(values: Sequence, omega, field: PrimeField) -> np.ndarray:
    """Naive transform: out[j] = sum_i v[i] * omega^(i*j).  Length = order of omega."""
    p = field.p
    v = _as_int_array(values, p)
    length = len(v)
    w = _omega_value(omega, p)
    if pow(w, length, p) != 1:
        raise InvalidOrderError("omega is not a root of unity of the transform length")
    powers = _power_table(w, length, p)
    mat = powers[np.outer(np.arange(length), np.arange(length)) % length]
    return matmul_mod(mat, v.reshape(-1, 1), p).ravel()


def idft(values: Sequence, omega, field: PrimeField) -> np.ndarray:
    p = field.p
    v = _as_int_array(values, p)
    length = len(v)
    w_inv = field.inv(_omega_value(omega, p))
    powers = _power_table(w_inv, length, p)
    mat = powers[np.outer(np.arange(length), np.arange(length)) % length]
    scale = field.inv(length % p)
    return (matmul_mod(mat, v.reshape(-1, 1), p).ravel() * scale) % p


def _power_table(base: int, count: int, p: int) -> np.ndarray:
    out = np.empty(count, dtype=np.int64)
    acc = 1
    for i in range(count):
        out[i] = acc
        acc = acc * base % p
    return out


def dft_matrix(omega: int, length: int, p: int) -> np.ndarray:
    """The full transform matrix, for batch transforms of many sequences."""
    powers = _power_table(omega % p, length, p)
    return powers[np.outer(np.arange(length), np.arange(length)) % length]


def matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """a @ b mod p without int64 overflow; chunks the inner dimension if needed."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    inner = a.shape[-1]
    bound = (p - 1) * (p - 1)
    step = max(1, (1 << 62) // max(1, bound))
    if inner <= step:
        return (a @ b) % p
    out = np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64)
    for start in range(0, inner, step):
        stop = min(inner, start + step)
        out = (out + a[..., start:stop] @ b[start:stop, ...]) % p
    return out


class Polynomial:
    """Coefficients lowest-degree first, stored canonically (no trailing zeros)."""

    __slots__ = ("coeffs", "p")

    def __init__(self, coeffs: Iterable, p: int):
        cs = [int(c) % p for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)
        self.p = p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.p
        return acc

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and other.p == self.p
            and other.coeffs == self.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.coeffs, self.p))

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if self.is_zero() or other.is_zero():
            return Polynomial([], self.p)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = (out[i + j] + a * b) % self.p
        return Polynomial(out, self.p)

    def divmod(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        p = self.p
        rem = list(self.coeffs)
        d = other.degree
        lead_inv = pow(other.coeffs[-1], -1, p)
        quot = [0] * max(0, len(rem) - d)
        for i in range(len(rem) - 1, d - 1, -1):
            factor = rem[i] * lead_inv % p
            if factor:
                quot[i - d] = factor
                for j, c in enumerate(other.coeffs):
                    rem[i - d + j] = (rem[i - d + j] - factor * c) % p
        return Polynomial(quot, p), Polynomial(rem, p)

    def divides(self, other: "Polynomial") -> bool:
        _, rem = other.divmod(self)
        return rem.is_zero()

    def __repr__(self) -> str:
        return f"Polynomial({list(self.coeffs)} mod {self.p})"


def berlekamp_massey(seq: Sequence[int], p: int) -> Polynomial:
    """Monic minimal generator g (degree e) with sum_j g[j]*s[i+j] = 0, g[e] = 1.

    The all-zero sequence yields the constant polynomial 1.
    """
    s = [int(v) % p for v in seq]
    n = len(s)
    # Connection polynomial C(x) = 1 + c1 x + ... + cL x^L with
    # s[i] + sum_j c_j s[i-j] = 0 for all valid i.
    c = [1] + [0] * n
    b = [1] + [0] * n
    length, m, b_disc = 0, 1, 1
    for i in range(n):
        disc = s[i]
        for j in range(1, length + 1):
            disc = (disc + c[j] * s[i - j]) % p
        if disc == 0:
            m += 1
            continue
        coef = disc * pow(b_disc, -1, p) % p
        if 2 * length <= i:
            c_prev = c[:]
            for j in range(0, n + 1 - m):
                c[j + m] = (c[j + m] - coef * b[j]) % p
            b, b_disc = c_prev, disc
            length, m = i + 1 - length, 1
        else:
            for j in range(0, n + 1 - m):
                c[j + m] = (c[j + m] - coef * b[j]) % p
            m += 1
    # g(x) = x^L * C(1/x): reverse the connection polynomial.
    g = list(reversed(c[: length + 1]))
    return Polynomial(g, p)


def generating_polynomial(seq: Sequence, field: PrimeField) -> Polynomial:
    """Minimal-degree monic annihilator of a linearly generated sequence."""
    if len(seq) == 0:
        raise ValueError("empty sequence")
    return berlekamp_massey([int(v) for v in seq], field.p)
