"""Bimodules over pairs of field extensions of a common prime field.

A :class:`Bimodule` is a finite-dimensional k-space with commuting left and
right actions of two extension fields.  Because each field is generated by
one element, an action is stored as the matrix of its generator.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field as dc_field

import numpy as np

from .fields import ExtensionField, _irreducible_finite, _irreducible_rational, field_from_dict
from .linalg import FieldError, PrimeField, Quotient, Subspace


class BimoduleError(ValueError):
    pass


class SymmetricDualsError(BimoduleError):
    pass


class Bimodule:
    """A ``left``--``right`` bimodule of k-dimension ``dim``.

    ``L`` and ``R`` are the (dim x dim) matrices of the left and right
    generators acting on column vectors.
    """

    def __init__(self, left: ExtensionField, right: ExtensionField, L, R, name: str = "", check: bool = True):
        if left.k != right.k:
            raise BimoduleError("left and right fields have different prime fields")
        self.left = left
        self.right = right
        self.k: PrimeField = left.k
        self.L = self.k.array(L) if not isinstance(L, np.ndarray) else L
        self.R = self.k.array(R) if not isinstance(R, np.ndarray) else R
        self.dim = self.L.shape[0]
        self.name = name
        self._tower = None
        self._lock = threading.Lock()
        if check:
            self.validate()

    def validate(self):
        F = self.k
        n = self.dim
        if self.L.shape != (n, n) or self.R.shape != (n, n):
            raise BimoduleError("action matrices must be square of the same size")
        if n % self.left.degree or n % self.right.degree:
            raise BimoduleError("k-dimension not divisible by the extension degrees")
        if not self.left.annihilates(self.L):
            raise BimoduleError("left action does not satisfy the defining polynomial")
        if not self.right.annihilates(self.R):
            raise BimoduleError("right action does not satisfy the defining polynomial")
        if not F.is_zero(F.sub(F.matmul(self.L, self.R), F.matmul(self.R, self.L))):
            raise BimoduleError("left and right actions do not commute")

    def __repr__(self):
        label = f"{self.name} " if self.name else ""
        return f"<Bimodule {label}{self.left}-{self.right} k-dim {self.dim} dims {self.dims}>"

    @property
    def left_dim(self) -> int:
        return self.dim // self.left.degree

    @property
    def right_dim(self) -> int:
        return self.dim // self.right.degree

    @property
    def dims(self):
        """Left-right dimension ``(m, n)``."""
        return (self.left_dim, self.right_dim)

    def left_matrix(self, a) -> np.ndarray:
        return self.left.polynomial_in(a, self.L)

    def right_matrix(self, b) -> np.ndarray:
        return self.right.polynomial_in(b, self.R)

    def tower(self) -> "DualTower":
        with self._lock:
            if self._tower is None:
                self._tower = DualTower(self)
            return self._tower

    def to_dict(self):
        F = self.k
        return {
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
            "dim": self.dim,
            "left_action": F.to_jsonable(self.L),
            "right_action": F.to_jsonable(self.R),
        }

    @classmethod
    def from_dict(cls, d, name: str = "") -> "Bimodule":
        left = field_from_dict(d["left"])
        right = field_from_dict(d["right"])
        n = int(d["dim"])
        L = left.k.from_jsonable(d["left_action"], (n, n))
        R = left.k.from_jsonable(d["right_action"], (n, n))
        return cls(left, right, L, R, name=name)


@dataclass
class BimoduleMap:
    source: Bimodule
    target: Bimodule
    matrix: np.ndarray
    note: dict = dc_field(default_factory=dict)

    def is_bimodule_map(self) -> bool:
        F = self.source.k
        T = self.matrix
        return (F.is_zero(F.sub(F.matmul(T, self.source.L), F.matmul(self.target.L, T)))
                and F.is_zero(F.sub(F.matmul(T, self.source.R), F.matmul(self.target.R, T))))

    def is_invertible(self) -> bool:
        return self.source.k.is_invertible(self.matrix)

    def inverse(self) -> "BimoduleMap":
        return BimoduleMap(self.target, self.source, self.source.k.inverse(self.matrix))


# -- linear helpers ---------------------------------------------------------

def commuting_maps(F: PrimeField, pairs, n_src: int, n_tgt: int) -> np.ndarray:
    """Basis of k-linear maps T (n_tgt x n_src) with ``T A == B T`` for each ``(A, B)``.

    Columns of the result are row-major vectorisations of T.
    """
    blocks = []
    Is, It = F.eye(n_src), F.eye(n_tgt)
    for A, B in pairs:
        # vec(T A) = (I (x) A^T) vec T ; vec(B T) = (B (x) I) vec T
        blk = F.sub(F.kron(It, A.T.copy()), F.kron(B, Is))
        if not F.is_zero(blk):
            blocks.append(blk)
    if not blocks:
        return F.eye(n_src * n_tgt)
    return F.kernel(np.concatenate(blocks, axis=0))


def find_invertible(F: PrimeField, mats, rng: np.random.Generator, tries: int = 64,
                    exhaustive_limit: int = 1 << 16):
    """Find an invertible linear combination of the square matrices ``mats``.

    Random coefficient tuples first, then exhaustive enumeration over small
    finite fields.  Returns ``(matrix, coefficients)`` or ``None``.
    """
    r = len(mats)
    if r == 0 or mats[0].shape[0] != mats[0].shape[1]:
        return None
    stack = np.stack(mats, axis=0)

    def combo(c):
        if F.p:
            return np.mod(np.tensordot(np.asarray(c, dtype=np.int64), stack, axes=1), F.p)
        return np.tensordot(np.array([F(x) for x in c], dtype=object), stack, axes=1)

    for t in range(r):
        if F.is_invertible(mats[t]):
            c = [0] * r
            c[t] = 1
            return mats[t], c
    for _ in range(tries):
        c = F.random(r, rng).tolist()
        T = combo(c)
        if F.is_invertible(T):
            return T, c
    if F.p and F.p ** r <= exhaustive_limit:
        for c in itertools.product(range(F.p), repeat=r):
            if not any(c):
                continue
            T = combo(c)
            if F.is_invertible(T):
                return T, list(c)
    return None


# -- duals ------------------------------------------------------------------

def _right_dual(X: Bimodule):
    """``Hom_{D_right}(X, D_right)`` with the pairing ``P[c, a, b] = psi_b(x_a)_c``."""
    F, D = X.k, X.right
    n, d = X.dim, D.degree
    K = commuting_maps(F, [(X.R, D.companion)], n, d)
    S = Subspace(F, K)
    K = S.basis
    Xd = Bimodule(
        D, X.left,
        S.coords(F.matmul(F.kron(D.companion, F.eye(n)), K)),
        S.coords(F.matmul(F.kron(F.eye(d), X.L.T.copy()), K)),
        name=f"({X.name})*" if X.name else "",
    )
    pairing = K.reshape(d, n, K.shape[1])
    return Xd, pairing


def _left_dual(X: Bimodule):
    """``Hom_{D_left}(X, D_left)`` with the pairing ``P[c, a, b] = psi_a(x_b)_c``."""
    F, D = X.k, X.left
    n, d = X.dim, D.degree
    K = commuting_maps(F, [(X.L, D.companion)], n, d)
    S = Subspace(F, K)
    K = S.basis
    Xd = Bimodule(
        X.right, D,
        S.coords(F.matmul(F.kron(F.eye(d), X.R.T.copy()), K)),
        S.coords(F.matmul(F.kron(D.companion, F.eye(n)), K)),
        name=f"*({X.name})" if X.name else "",
    )
    pairing = np.transpose(K.reshape(d, n, K.shape[1]), (0, 2, 1)).copy()
    return Xd, pairing


def right_dual(X: Bimodule) -> Bimodule:
    return _right_dual(X)[0]


def left_dual(X: Bimodule) -> Bimodule:
    return _left_dual(X)[0]


class DualTower:
    """The iterated duals ``M^{i*}`` with their consecutive pairings.

    ``pairing(i)[c, a, b]`` is the D_{i+1}-valued pairing of basis vector
    ``a`` of ``M^{i*}`` with basis vector ``b`` of ``M^{(i+1)*}``.
    """

    def __init__(self, M: Bimodule):
        self.M = M
        self._duals = {0: M}
        self._pairings = {}
        self._lock = threading.RLock()

    def dual(self, i: int) -> Bimodule:
        with self._lock:
            if i in self._duals:
                return self._duals[i]
            if i > 0:
                prev = self.dual(i - 1)
                Xd, P = _right_dual(prev)
                self._duals[i] = Xd
                self._pairings[i - 1] = P
            else:
                nxt = self.dual(i + 1)
                Xd, P = _left_dual(nxt)
                self._duals[i] = Xd
                self._pairings[i] = P
            return self._duals[i]

    def pairing(self, i: int) -> np.ndarray:
        with self._lock:
            if i not in self._pairings:
                if i >= 0:
                    self.dual(i + 1)
                else:
                    self.dual(i)
            return self._pairings[i]

    def field(self, i: int) -> ExtensionField:
        """``D_i`` (D_0 or D_1 by parity)."""
        return self.M.left if i % 2 == 0 else self.M.right


def iterate_dual(M: Bimodule, i: int) -> Bimodule:
    return M.tower().dual(i)


@dataclass
class DualBasisPair:
    """A right basis of ``X`` over its right field and the dual left basis of ``Y``."""
    basis: np.ndarray        # columns: phi_1..phi_n in X
    dual: np.ndarray         # columns: phi_1^*..phi_n^* in Y
    pairing_matrix: np.ndarray  # [j, l] = <phi_l, phi_j^*> as a D-element (last axis)

    @property
    def n(self) -> int:
        return self.basis.shape[1]


def right_basis(X: Bimodule) -> np.ndarray:
    """Greedy right basis of X over its right field (columns)."""
    F = X.k
    chosen = []
    span = F.zeros((X.dim, 0))
    rank = 0
    powers = [F.eye(X.dim)]
    for _ in range(1, X.right.degree):
        powers.append(F.matmul(powers[-1], X.R))
    for a in range(X.dim):
        if rank == X.dim:
            break
        e = F.zeros(X.dim)
        e[a] = 1
        trial = np.concatenate([span, e.reshape(-1, 1)], axis=1)
        if F.rank(trial) > rank:
            chosen.append(a)
            orbit = np.stack([F.matmul(P, e) for P in powers], axis=1)
            span = np.concatenate([span, orbit], axis=1)
            rank = F.rank(span)
    B = F.zeros((X.dim, len(chosen)))
    for t, a in enumerate(chosen):
        B[a, t] = 1
    return B


def dual_basis(X: Bimodule, Y: Bimodule | None = None, pairing: np.ndarray | None = None) -> DualBasisPair:
    """Right basis ``phi_j`` of X over its right field and ``phi_j^*`` in Y with
    ``<phi_l, phi_j^*> = delta_{jl}``.  ``Y`` defaults to the right dual of X."""
    F = X.k
    if Y is None:
        Y, pairing = _right_dual(X)
    d = pairing.shape[0]
    B = right_basis(X)
    n = B.shape[1]
    # rows (l, c): sum_b <phi_l, f_b>_c y_b
    Pl = np.einsum("cab,al->lcb", pairing, B) if F.p == 0 else np.mod(np.einsum("cab,al->lcb", pairing, B), F.p)
    A = Pl.reshape(n * d, Y.dim)
    rhs = F.zeros((n * d, n))
    for j in range(n):
        rhs[j * d, j] = 1
    sol = F.solve(A, rhs)
    if sol is None:
        raise BimoduleError("pairing is degenerate; no dual basis")
    pm = pairing_values(F, pairing, B, sol)
    return DualBasisPair(B, sol, pm)


def pairing_values(F: PrimeField, pairing, xs, ys) -> np.ndarray:
    """``out[l, j, c] = <x_l, y_j>_c`` for columns of ``xs`` and ``ys``."""
    out = np.einsum("cab,al,bj->ljc", pairing, xs, ys)
    return F.reduce(out) if F.p else out


# -- tensor products --------------------------------------------------------

class TensorProduct:
    """``X (x)_D Y`` as a quotient of the k-tensor product (index ``a*dimY + b``)."""

    def __init__(self, X: Bimodule, Y: Bimodule):
        if X.right != Y.left:
            raise BimoduleError(f"field mismatch in tensor product: {X.right} vs {Y.left}")
        F = X.k
        self.X, self.Y = X, Y
        N = X.dim * Y.dim
        if X.right.degree == 1:
            rel = None
        else:
            rel = F.sub(F.kron(X.R, F.eye(Y.dim)), F.kron(F.eye(X.dim), Y.L))
        self.quotient = Quotient(F, N, rel)
        self.proj = self.quotient.proj
        self.sect = self.quotient.sect
        P, S = self.proj, self.sect
        self.bimodule = Bimodule(
            X.left, Y.right,
            F.matmul(P, F.matmul(F.kron(X.L, F.eye(Y.dim)), S)),
            F.matmul(P, F.matmul(F.kron(F.eye(X.dim), Y.R), S)),
            name=f"{X.name}(x){Y.name}" if X.name and Y.name else "",
            check=False,
        )

    @property
    def dim(self) -> int:
        return self.quotient.dim

    def pure(self, x, y):
        F = self.X.k
        return F.matmul(self.proj, F.kron(x.reshape(-1, 1), y.reshape(-1, 1)))[:, 0]


def tensor_over(X: Bimodule, Y: Bimodule) -> Bimodule:
    return TensorProduct(X, Y).bimodule


# -- symmetric duals --------------------------------------------------------

def bimodule_maps(X: Bimodule, Y: Bimodule) -> list:
    """Basis of the bimodule maps ``X -> Y`` as a list of matrices."""
    if X.left != Y.left or X.right != Y.right:
        return []
    F = X.k
    K = commuting_maps(F, [(X.L, Y.L), (X.R, Y.R)], X.dim, Y.dim)
    return [K[:, t].reshape(Y.dim, X.dim) for t in range(K.shape[1])]


def check_symmetric_duals(M: Bimodule, seed: int = 0) -> BimoduleMap:
    """Search for a bimodule isomorphism ``M -> M**``."""
    T = M.tower()
    Mss = T.dual(2)
    if (Mss.left != M.left or Mss.right != M.right or Mss.dim != M.dim
            or T.dual(1).dims != (M.right_dim, M.left_dim)):
        raise SymmetricDualsError("no symmetric-duals witness (dimension obstruction)")
    basis = bimodule_maps(M, Mss)
    rng = np.random.default_rng(seed)
    found = find_invertible(M.k, basis, rng)
    if found is None:
        raise SymmetricDualsError("no symmetric-duals witness")
    mat, coeffs = found
    return BimoduleMap(M, Mss, mat, note={"method": "search", "hom_dim": len(basis),
                                          "coefficients": [str(c) for c in coeffs], "seed": seed})


def trace_witness(M: Bimodule) -> BimoduleMap:
    """The isomorphism ``M -> M**`` characterised by
    ``tr_{D0}(theta(x)(delta)) = tr_{D1}(delta(x))`` for all ``delta`` in ``M*``."""
    F = M.k
    T = M.tower()
    Mss = T.dual(2)
    B0, B1 = T.pairing(0), T.pairing(1)
    t0 = M.left.trace_functional()   # values of <M*, M**> lie in D0
    t1 = M.right.trace_functional()  # values of <M, M*> lie in D1
    G = F.reduce(np.einsum("c,cab->ab", t0, B1)) if F.p else np.einsum("c,cab->ab", t0, B1)
    rhs = F.reduce(np.einsum("c,cxa->ax", t1, B0)) if F.p else np.einsum("c,cxa->ax", t1, B0)
    if not F.is_invertible(G):
        raise SymmetricDualsError("trace form degenerate")
    theta = F.solve(G, rhs)
    bm = BimoduleMap(M, Mss, theta, note={"method": "trace"})
    if not bm.is_bimodule_map() or not bm.is_invertible():
        raise SymmetricDualsError("trace form degenerate")
    return bm


def _embed(small: ExtensionField, big: ExtensionField):
    """An element of ``big`` satisfying the defining polynomial of ``small``."""
    if small.degree == 1:
        v = big.zero()
        v[0] = small.k(-small.poly[0])
        return v
    if big.k.p == 0:
        raise FieldError("embedding search over Q is only supported for degree-1 subfields")
    for a in big.elements():
        if small.annihilates(big.mult_matrix(a)):
            return a
    raise FieldError(f"{small} does not embed in {big}")


def minimal_polynomial(F: PrimeField, Z: np.ndarray):
    """Monic minimal polynomial of a square matrix, low degree first."""
    n = Z.shape[0]
    powers = [F.eye(n).ravel()]
    P = F.eye(n)
    for e in range(1, n + 1):
        P = F.matmul(P, Z)
        A = np.stack(powers, axis=1)
        c = F.solve(A, P.ravel())
        if c is not None:
            return [F(-x) for x in c] + [F(1)]
        powers.append(P.ravel())
    raise AssertionError("Cayley-Hamilton violated")


def is_simple(M: Bimodule, seed: int = 0, tries: int = 32):
    """Certify simplicity of ``M``: find an element of the acting algebra whose
    minimal polynomial on M is irreducible of degree ``dim M``.

    Returns True when certified; False means no certificate was found.
    """
    F = M.k
    rng = np.random.default_rng(seed)
    monos = []
    Lp = F.eye(M.dim)
    for s in range(M.left.degree):
        Rp = F.eye(M.dim)
        for t in range(M.right.degree):
            monos.append(F.matmul(Lp, Rp))
            Rp = F.matmul(Rp, M.R)
        Lp = F.matmul(Lp, M.L)
    for _ in range(tries):
        c = F.random(len(monos), rng)
        Z = F.zeros((M.dim, M.dim))
        for ci, Mi in zip(c, monos):
            Z = F.add(Z, F.scale(ci, Mi))
        mp = minimal_polynomial(F, Z)
        if len(mp) - 1 != M.dim:
            continue
        try:
            ok = _irreducible_rational(mp) if F.p == 0 else _irreducible_finite(mp, F)
        except FieldError:
            continue
        if ok:
            return True
    return False


def free_bimodule(D: ExtensionField, n: int) -> Bimodule:
    """``D^n`` as a D-D-bimodule with both actions by multiplication."""
    F = D.k
    C = F.kron(F.eye(n), D.companion)
    return Bimodule(D, D, C, C.copy(), name=f"{D}^{n}")


def field_as_bimodule(big: ExtensionField, small: ExtensionField, root=None) -> Bimodule:
    """``big`` as a big-small-bimodule via an embedding of ``small``."""
    if root is None:
        root = _embed(small, big)
    return Bimodule(big, small, big.companion.copy(), big.mult_matrix(root), name="D0")


def make_symmetric_duals(case: int, D0: ExtensionField, D1: ExtensionField, n: int | None = None,
                         bimodule: Bimodule | None = None, seed: int = 0):
    """Build ``M`` for the three standard sources of symmetric duals, with a
    trace-pairing witness ``M -> M**``.

    Case 1: both fields finite over k (``M`` given, or ``D^n`` when D0 == D1).
    Case 2: ``M = D0`` as a D0-D1-bimodule for a subfield D1.
    Case 3: commutative fields and a simple ``M``.
    The returned map's ``note['hypothesis']`` records whether the
    characteristic condition held; the witness is verified directly either way.
    """
    p = D0.k.p
    if case == 1:
        M = bimodule if bimodule is not None else free_bimodule(D0, n or 1)
        hyp = p == 0 or (D0.degree % p != 0 and D1.degree % p != 0)
    elif case == 2:
        if D0.degree % D1.degree:
            raise BimoduleError("D1 is not a subfield of D0 (degree does not divide)")
        M = bimodule if bimodule is not None else field_as_bimodule(D0, D1)
        m = D0.degree // D1.degree
        hyp = p == 0 or m % p != 0
    elif case == 3:
        if bimodule is None:
            raise BimoduleError("case 3 needs an explicit simple bimodule")
        M = bimodule
        if not is_simple(M, seed=seed):
            raise BimoduleError("bimodule is not (certified) simple")
        m, nn = M.dims
        hyp = p == 0 or (m % p != 0 and nn % p != 0)
    else:
        raise BimoduleError(f"unknown case {case}")
    if M.left != D0 or M.right != D1:
        raise BimoduleError("bimodule fields do not match D0, D1")
    w = trace_witness(M)
    w.note["hypothesis"] = bool(hyp)
    w.note["case"] = case
    return M, w
