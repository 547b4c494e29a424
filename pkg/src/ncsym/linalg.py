"""Exact dense linear algebra over prime fields GF(p) and the rationals.

Matrices are plain numpy arrays.  Over GF(p) they have dtype int64 with
entries normalised to ``[0, p)``; over Q they have dtype object and hold
:class:`fractions.Fraction` values.  All routines are pure.

Large eliminations are delegated to FLINT (``python-flint``) when it is
importable; the in-house elimination is always available and is what the
test-suite compares FLINT against.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

try:  # pragma: no cover - exercised implicitly when installed
    import flint as _flint
except ImportError:  # pragma: no cover
    _flint = None

# Matrices with more entries than this go to FLINT when available.
FLINT_THRESHOLD = 40_000


class FieldError(ValueError):
    """Raised for invalid field data (bad characteristic, reducible polynomial)."""


class DimensionError(ValueError):
    """Raised when matrix shapes do not compose."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


class PrimeField:
    """The prime field GF(p), or Q when ``characteristic == 0``."""

    def __init__(self, characteristic: int):
        characteristic = int(characteristic)
        if characteristic != 0 and not _is_prime(characteristic):
            raise FieldError(f"invalid characteristic {characteristic}")
        self.p = characteristic
        self.dtype = object if characteristic == 0 else np.int64
        self.use_flint = _flint is not None

    # -- identity ---------------------------------------------------------
    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def is_rational(self) -> bool:
        return self.p == 0

    @property
    def order(self) -> float:
        return math.inf if self.p == 0 else self.p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def __repr__(self):
        return "QQ" if self.p == 0 else f"GF({self.p})"

    # -- scalars ----------------------------------------------------------
    def __call__(self, x):
        if self.p == 0:
            return Fraction(x)
        if isinstance(x, Fraction):
            return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
        return int(x) % self.p

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.p == 0:
            return 1 / Fraction(x)
        return pow(int(x), -1, self.p)

    def elements(self):
        """Iterate over all elements (finite fields only)."""
        if self.p == 0:
            raise FieldError("Q is infinite")
        return range(self.p)

    # -- arrays -----------------------------------------------------------
    def array(self, data) -> np.ndarray:
        a = np.array(data, dtype=object)
        if self.p == 0:
            out = np.empty(a.shape, dtype=object)
            for idx in np.ndindex(a.shape):
                out[idx] = Fraction(a[idx])
            return out
        if a.size == 0:
            return np.zeros(a.shape, dtype=np.int64)
        flat = [self(x) for x in a.ravel()]
        return np.array(flat, dtype=np.int64).reshape(a.shape)

    def zeros(self, shape) -> np.ndarray:
        if self.p == 0:
            out = np.empty(shape, dtype=object)
            out.fill(Fraction(0))
            return out
        return np.zeros(shape, dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = 1 if self.p else Fraction(1)
        return out

    def reduce(self, a: np.ndarray) -> np.ndarray:
        if self.p == 0:
            return a
        return np.mod(a, self.p)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.shape[-1] != b.shape[0]:
            raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
        if self.p == 0:
            if a.shape[-1] == 0:
                return self.zeros(a.shape[:-1] + b.shape[1:])
            return np.dot(a, b)
        if self.p < 3_000_000:
            # products are < p^2; split the inner dimension so sums cannot overflow
            chunk = max(1, (2**62) // (self.p - 1) ** 2 if self.p > 1 else 1)
            n = a.shape[-1]
            if n <= chunk:
                return np.mod(a @ b, self.p)
            out = None
            for s in range(0, n, chunk):
                part = np.mod(a[..., s:s + chunk] @ b[s:s + chunk], self.p)
                out = part if out is None else np.mod(out + part, self.p)
            return out
        # huge p: fall back to python integers
        return self.array(np.dot(a.astype(object), b.astype(object)))

    def add(self, a, b):
        return self.reduce(a + b)

    def sub(self, a, b):
        return self.reduce(a - b)

    def scale(self, c, a):
        if self.p == 0:
            return a * Fraction(c)
        return np.mod(a * (int(c) % self.p), self.p)

    def neg(self, a):
        return self.reduce(-a)

    def kron(self, a, b):
        if self.p == 0:
            return np.kron(a, b)
        return np.mod(np.kron(a, b), self.p)

    def is_zero(self, a) -> bool:
        if a.size == 0:
            return True
        if self.p == 0:
            return all(x == 0 for x in a.ravel())
        return not np.any(a)

    def random(self, shape, rng: np.random.Generator, bound: int = 5) -> np.ndarray:
        """Uniform random matrix over GF(p); small random integers over Q."""
        if self.p == 0:
            vals = rng.integers(-bound, bound + 1, size=shape)
            return self.array(vals)
        return rng.integers(0, self.p, size=shape).astype(np.int64)

    def to_jsonable(self, a: np.ndarray):
        if self.p == 0:
            return np.vectorize(str, otypes=[object])(a).tolist() if a.size else a.tolist()
        return a.tolist()

    def from_jsonable(self, data, shape=None) -> np.ndarray:
        a = self.array(data)
        if shape is not None:
            a = a.reshape(shape)
        return a

    # -- elimination ------------------------------------------------------
    def rref(self, a: np.ndarray):
        """Reduced row echelon form.

        Returns ``(R, pivots)`` where ``R`` holds only the nonzero rows and
        ``pivots[t]`` is the pivot column of row ``t``.
        """
        a = np.asarray(a)
        m, n = a.shape
        if m == 0 or n == 0:
            return self.zeros((0, n)), []
        if self.use_flint and m * n > FLINT_THRESHOLD:
            return self._rref_flint(a)
        return self._rref_dense(a)

    def _rref_dense(self, a: np.ndarray):
        A = a.copy()
        m, n = A.shape
        pivots = []
        r = 0
        p = self.p
        for c in range(n):
            if r == m:
                break
            col = A[r:, c]
            nz = np.nonzero(col != 0)[0]
            if len(nz) == 0:
                continue
            piv = r + int(nz[0])
            if piv != r:
                A[[r, piv]] = A[[piv, r]]
            inv = self.inv(A[r, c])
            if p:
                A[r, c:] = (A[r, c:] * inv) % p
            else:
                A[r, c:] = A[r, c:] * inv
            colvals = A[:, c].copy()
            colvals[r] = 0
            rows = np.nonzero(colvals != 0)[0]
            if len(rows):
                upd = np.outer(colvals[rows], A[r, c:])
                if p:
                    A[rows, c:] = (A[rows, c:] - upd) % p
                else:
                    A[rows, c:] = A[rows, c:] - upd
            pivots.append(c)
            r += 1
        return A[:r].copy(), pivots

    def _rref_flint(self, a: np.ndarray):
        m, n = a.shape
        if self.p:
            M = _flint.nmod_mat(m, n, a.ravel().tolist(), self.p)
            R, rank = M.rref()
            vals = np.array([int(x) for x in R.entries()], dtype=np.int64).reshape(m, n)
        else:
            entries = [_flint.fmpq(x.numerator, x.denominator) for x in a.ravel()]
            M = _flint.fmpq_mat(m, n, entries)
            R, rank = M.rref()
            flat = [Fraction(int(x.p), int(x.q)) for x in R.entries()]
            vals = np.array(flat, dtype=object).reshape(m, n)
        R = vals[:rank].copy()
        pivots = []
        for t in range(rank):
            row = R[t]
            pivots.append(int(np.nonzero(row != 0)[0][0]))
        return R, pivots

    def rank(self, a: np.ndarray) -> int:
        a = np.asarray(a)
        if a.size == 0:
            return 0
        if self.use_flint and a.size > FLINT_THRESHOLD:
            if self.p:
                return _flint.nmod_mat(a.shape[0], a.shape[1], a.ravel().tolist(), self.p).rank()
            entries = [_flint.fmpq(x.numerator, x.denominator) for x in a.ravel()]
            return _flint.fmpq_mat(a.shape[0], a.shape[1], entries).rank()
        return len(self._rref_dense(a)[1])

    def sparse_rank(self, columns) -> int:
        """Rank of the span of sparse vectors given as ``{row: value}`` dicts.

        Incremental echelon form keyed by leading row; cheap when the vectors
        have few nonzeros, as the word-relation matrices do."""
        p = self.p
        pivots = {}
        for col in columns:
            v = {r: self(x) for r, x in col.items() if x}
            if p:
                v = {r: x for r, x in v.items() if x}
            while v:
                r = min(v)
                piv = pivots.get(r)
                if piv is None:
                    c = self.inv(v[r])
                    pivots[r] = {s: (x * c) % p if p else x * c for s, x in v.items()}
                    break
                c = v[r]
                for s, x in piv.items():
                    y = v.get(s, 0) - c * x
                    if p:
                        y %= p
                    if y:
                        v[s] = y
                    else:
                        v.pop(s, None)
        return len(pivots)

    def kernel(self, a: np.ndarray) -> np.ndarray:
        """Basis of the right kernel ``{x : a x = 0}`` as the columns of a matrix."""
        a = np.asarray(a)
        m, n = a.shape
        R, piv = self.rref(a)
        free = [c for c in range(n) if c not in set(piv)]
        K = self.zeros((n, len(free)))
        for t, c in enumerate(free):
            K[c, t] = 1
            for r, pc in enumerate(piv):
                K[pc, t] = self.neg(R[r, c]) if self.p else -R[r, c]
        return K

    def image(self, a: np.ndarray) -> np.ndarray:
        """Basis of the column space, as the columns of a matrix (in RREF form)."""
        a = np.asarray(a)
        R, _ = self.rref(a.T)
        return R.T.copy()

    def solve(self, a: np.ndarray, b: np.ndarray):
        """Some solution ``x`` of ``a x = b`` (``b`` a vector or matrix), or ``None``."""
        a = np.asarray(a)
        b = np.asarray(b)
        vec = b.ndim == 1
        B = b.reshape(-1, 1) if vec else b
        if a.shape[0] != B.shape[0]:
            raise DimensionError(f"solve: {a.shape} against {b.shape}")
        m, n = a.shape
        aug = np.concatenate([a, B], axis=1) if n else B.copy()
        R, piv = self.rref(aug)
        if any(c >= n for c in piv):
            return None
        X = self.zeros((n, B.shape[1]))
        for r, c in enumerate(piv):
            X[c] = R[r, n:]
        return X[:, 0] if vec else X

    def inverse(self, a: np.ndarray) -> np.ndarray:
        n = a.shape[0]
        if a.shape != (n, n):
            raise DimensionError("inverse of a non-square matrix")
        X = self.solve(a, self.eye(n))
        if X is None or self.rank(a) < n:
            raise ZeroDivisionError("singular matrix")
        return X

    def det(self, a: np.ndarray):
        n = a.shape[0]
        A = a.copy()
        d = self(1)
        for c in range(n):
            nz = np.nonzero(A[c:, c] != 0)[0]
            if len(nz) == 0:
                return self(0)
            piv = c + int(nz[0])
            if piv != c:
                A[[c, piv]] = A[[piv, c]]
                d = -d
            d = d * A[c, c]
            inv = self.inv(A[c, c])
            below = A[c + 1:, c] * inv
            A[c + 1:, c:] = A[c + 1:, c:] - np.outer(below, A[c, c:])
            A = self.reduce(A)
            if self.p:
                d %= self.p
        return self(d)

    def is_invertible(self, a: np.ndarray) -> bool:
        return a.shape[0] == a.shape[1] and self.rank(a) == a.shape[0]


class Subspace:
    """A subspace of ``F^N`` with a basis (columns of ``basis``) and fast coordinates."""

    def __init__(self, field: PrimeField, spanning: np.ndarray, ambient: int | None = None):
        self.F = field
        spanning = np.asarray(spanning)
        if ambient is None:
            ambient = spanning.shape[0]
        self.ambient = ambient
        if spanning.size == 0:
            self.basis = field.zeros((ambient, 0))
        else:
            self.basis = field.image(spanning)
        self.dim = self.basis.shape[1]
        # rows of the basis where it restricts to an invertible matrix
        if self.dim:
            _, rows = field.rref(self.basis.T)
            self._rows = rows
            self._inv = field.inverse(self.basis[rows])
        else:
            self._rows = []
            self._inv = field.zeros((0, 0))

    def coords(self, v: np.ndarray, check: bool = True) -> np.ndarray:
        """Coordinates of ``v`` (vector or matrix of column vectors) in ``self.basis``."""
        F = self.F
        v = np.asarray(v)
        if self.dim == 0:
            shape = (0,) if v.ndim == 1 else (0, v.shape[1])
            c = F.zeros(shape)
        else:
            c = F.matmul(self._inv, v[self._rows])
        if check and not F.is_zero(F.sub(F.matmul(self.basis, c), v)):
            raise ValueError("vector not in subspace")
        return c

    def contains(self, v: np.ndarray) -> bool:
        try:
            self.coords(v)
        except ValueError:
            return False
        return True


class Quotient:
    """The quotient ``F^N / W`` with a pivot-complement basis.

    ``proj`` (q x N) maps ambient vectors to quotient coordinates and
    ``sect`` (N x q) is the standard lift of quotient basis vectors.
    """

    def __init__(self, field: PrimeField, ambient: int, relations: np.ndarray | None):
        F = self.F = field
        self.ambient = ambient
        if relations is None or relations.size == 0:
            R, piv = F.zeros((0, ambient)), []
        else:
            R, piv = F.rref(np.asarray(relations).T)
        self.relations_rank = len(piv)
        pivset = set(piv)
        self.free = [c for c in range(ambient) if c not in pivset]
        q = len(self.free)
        self.dim = q
        P = F.zeros((q, ambient))
        col_of = {c: t for t, c in enumerate(self.free)}
        for c, t in col_of.items():
            P[t, c] = 1
        if len(piv):
            # e_pc == -sum_{free c} R[r, c] e_c modulo W
            Rfree = R[:, self.free]
            for r, pc in enumerate(piv):
                P[:, pc] = F.neg(Rfree[r]) if F.p else -Rfree[r]
        self.proj = P
        S = F.zeros((ambient, q))
        for t, c in enumerate(self.free):
            S[c, t] = 1
        self.sect = S


@lru_cache(maxsize=None)
def prime_field(characteristic: int) -> PrimeField:
    return PrimeField(characteristic)
