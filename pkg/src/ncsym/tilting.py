"""DA, the canonical complex ``omega = DA[-1]`` and the preprojective family.

Both twists are computed on sums of shifted modules only (``A`` is
hereditary).  ``- (x)^L omega`` tensors the standard projective
presentation of a module with DA; ``- (x)^L omega^{-1} = RHom(DA, -)[1]``
applies ``Hom_A(-, X)`` to the projective bimodule resolution of DA, which
gives a two-term complex of right modules ``C0 -> C1``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .algebra import IndexedAlgebra, VerificationReport
from .bimodule import TensorProduct, _right_dual, commuting_maps
from .linalg import Subspace
from .species import (DerivedObject, ModuleMap, SpeciesModule, SpeciesRing, as_right_bimodule,
                      direct_sum, ext1_dim, find_isomorphism, hom_space, quotient_module, submodule)


def _powers(F, A, d):
    out = [F.eye(A.shape[0])]
    for _ in range(1, d):
        out.append(F.matmul(out[-1], A))
    return np.stack(out, axis=0)


def _red(F, a):
    return F.reduce(a) if F.p else a


class WitnessError(RuntimeError):
    pass


@dataclass
class DAObject:
    ring: SpeciesRing
    module: SpeciesModule        # S0 + e1DA as a right module
    summands: tuple
    left: list                   # left action matrices of a k-basis of A
    right: list                  # right action matrices of the same basis
    checks: dict


def _algebra_basis(ring: SpeciesRing):
    """Basis of A as triples (kind, index) and its structure constants."""
    d0, m, d1 = ring.D0.degree, ring.m, ring.D1.degree
    return [("D0", t) for t in range(d0)] + [("M", u) for u in range(m)] + [("D1", t) for t in range(d1)]


def _algebra_product(ring: SpeciesRing, x, y):
    """Product of two basis elements as a coordinate vector of A."""
    F = ring.F
    d0, m, d1 = ring.D0.degree, ring.m, ring.D1.degree
    out = F.zeros(d0 + m + d1)
    (kx, ix), (ky, iy) = x, y
    if kx == "D0" and ky == "D0":
        out[:d0] = ring.D0._powers[ix][:, iy]
    elif kx == "D0" and ky == "M":
        out[d0:d0 + m] = _powers(F, ring.M.L, d0)[ix][:, iy]
    elif kx == "M" and ky == "D1":
        out[d0:d0 + m] = _powers(F, ring.M.R, d1)[iy][:, ix]
    elif kx == "D1" and ky == "D1":
        out[d0 + m:] = ring.D1._powers[ix][:, iy]
    return out


def build_DA(ring: SpeciesRing) -> DAObject:
    """DA with both actions written out on ``(a, delta, b)`` coordinates and every axiom checked."""
    F = ring.F
    d0, d1 = ring.D0.degree, ring.D1.degree
    Ms = ring.Mstar
    s = Ms.dim
    n = d0 + s + d1
    P0, P1 = ring.D0._powers, ring.D1._powers
    LMs, RMs = _powers(F, Ms.L, d1), _powers(F, Ms.R, d0)
    basis = _algebra_basis(ring)
    left, right = [], []
    for kind, t in basis:
        lam, rho = F.zeros((n, n)), F.zeros((n, n))
        if kind == "D0":
            lam[:d0, :d0] = P0[t]
            rho[:d0, :d0] = P0[t]
            rho[d0:d0 + s, d0:d0 + s] = RMs[t]
        elif kind == "D1":
            lam[d0:d0 + s, d0:d0 + s] = LMs[t]
            lam[d0 + s:, d0 + s:] = P1[t]
            rho[d0 + s:, d0 + s:] = P1[t]
        else:
            lam[:d0, d0:d0 + s] = ring.theta_pair[:, t, :]
            rho[d0 + s:, d0:d0 + s] = ring.eval[:, t, :]
        left.append(lam)
        right.append(rho)
    # axioms on all basis pairs
    ok_left = ok_right = ok_comm = True
    for a, x in enumerate(basis):
        for b, y in enumerate(basis):
            xy = _algebra_product(ring, x, y)
            L_xy = sum((F.scale(xy[c], left[c]) for c in range(len(basis))), F.zeros((n, n)))
            R_xy = sum((F.scale(xy[c], right[c]) for c in range(len(basis))), F.zeros((n, n)))
            L_xy, R_xy = _red(F, L_xy), _red(F, R_xy)
            ok_left &= F.is_zero(F.sub(F.matmul(left[a], left[b]), L_xy))
            ok_right &= F.is_zero(F.sub(F.matmul(right[b], right[a]), R_xy))
            ok_comm &= F.is_zero(F.sub(F.matmul(left[a], right[b]), F.matmul(right[b], left[a])))
    unit = _red(F, F.add(left[0], left[len(basis) - d1]))
    ok_unit = F.is_zero(F.sub(unit, F.eye(n)))
    checks = {"left_associative": bool(ok_left), "right_associative": bool(ok_right),
              "actions_commute": bool(ok_comm), "unital": bool(ok_unit)}
    if not all(checks.values()):
        raise WitnessError(f"witness incompatible: DA action axioms fail {checks}")
    S0, I1 = ring.injective0(), ring.injective1()
    mod = direct_sum(S0, I1, name="DA")
    return DAObject(ring, mod, (S0, I1), left, right, checks)


def verify_DA(DA: DAObject) -> VerificationReport:
    """Injectivity of both summands and ``End(DA) = image of A``."""
    t0 = time.perf_counter()
    ring = DA.ring
    F = ring.F
    S0, S1 = ring.simple0(), ring.simple1()
    exts = {f"Ext1({a.name},{b.name})": ext1_dim(a, b) for a in (S0, S1) for b in DA.summands}
    E = hom_space(DA.module, DA.module)
    # left multiplications by A are right-module endomorphisms spanning End(DA)
    n0 = DA.module.x0
    left_mod = DA.left
    span_left = F.rank(np.stack([x.ravel() for x in left_mod], axis=1))
    is_endo = []
    for lam in left_mod:
        f0, f1 = lam[:n0, :n0], lam[n0:, n0:]
        zero_off = F.is_zero(lam[n0:, :n0]) and F.is_zero(lam[:n0, n0:])
        is_endo.append(bool(zero_off and ModuleMap(DA.module, DA.module, f0, f1).is_homomorphism()))
    ok = (all(v == 0 for v in exts.values()) and E.dim == ring.dim() and span_left == ring.dim()
          and all(is_endo))
    det = {"ext1": exts, "end_dim": E.dim, "dim_A": ring.dim(), "left_action_rank": span_left,
           "left_action_is_endomorphism": all(is_endo), "axioms": DA.checks}
    return VerificationReport("DA", ok, {}, [det], None if ok else det, timing=time.perf_counter() - t0)


class Tilting:
    """Twists by ``omega`` and the modules ``P_i``, ``L_i`` for one instance."""

    def __init__(self, S: IndexedAlgebra, ring: SpeciesRing | None = None):
        self.S = S
        self.ring = ring if ring is not None else SpeciesRing(S.M, S.witness)
        if self.S.witness is None:
            self.S.witness = self.ring.witness
        self.F = self.ring.F
        r = self.ring
        self._Pcache = {}
        self.Ms = r.Mstar
        self.Y = TensorProduct(self.Ms, r.M)  # M* (x)_{D0} M
        d0, d1 = r.D0.degree, r.D1.degree
        self._LM = _powers(self.F, r.M.L, d0)

    # -- helpers -----------------------------------------------------------
    def _act(self, A, coeffs_axis):
        """``sum_c A^c (x) coeff[c, ...]``: returns tensor with leading (out, in) axes."""
        F = self.F
        d = coeffs_axis.shape[0]
        Ap = _powers(F, A, d)
        return _red(F, np.tensordot(Ap, coeffs_axis, axes=([0], [0])))

    # -- omega ----------------------------------------------------------------
    def _omega_map(self, N: SpeciesModule) -> ModuleMap:
        r, F = self.ring, self.F
        m, Ms = r.m, self.Ms
        s = Ms.dim
        TW = TensorProduct(as_right_bimodule(r, N.A0, r.D0), r.M)
        W = TW.bimodule
        U = TensorProduct(W, Ms)
        # rho_Src[w', q, u] = sum_{w, delta} (w . delta(m_u))[w'] sect[(w, delta), q]
        G = self._act(W.R, r.eval)  # (w', w, u, delta)
        sect = U.sect.reshape(W.dim, s, U.dim)
        rho_src = _red(F, np.einsum("awud,wdq->aqu", G, sect)).reshape(W.dim, U.dim * m)
        Src = SpeciesModule(r, U.bimodule.R, W.R, rho_src, name="Src", check=False)
        V = TensorProduct(as_right_bimodule(r, N.A1, r.D1), Ms)
        t0 = N.x0 + V.dim
        A0T = F.zeros((t0, t0))
        A0T[:N.x0, :N.x0] = N.A0
        A0T[N.x0:, N.x0:] = V.bimodule.R
        GV = self._act(N.A1, r.eval)  # (y', y, u, delta)
        sectV = V.sect.reshape(N.x1, s, V.dim)
        rho_v = _red(F, np.einsum("ayud,ydq->aqu", GV, sectV))
        rho_tgt = F.zeros((N.x1, t0, m))
        rho_tgt[:, N.x0:, :] = rho_v
        Tgt = SpeciesModule(r, A0T, N.A1, rho_tgt.reshape(N.x1, t0 * m), name="Tgt", check=False)
        # f0 on U: (x (x) m) (x) delta -> (x . theta(m)(delta), -rho(x (x) m) (x) delta)
        Th = self._act(N.A0, r.theta_pair)  # (x', x, u, delta)
        lift = F.matmul(F.kron(TW.sect, F.eye(s)), U.sect).reshape(N.x0, m, s, U.dim)
        first = _red(F, np.einsum("axud,xudq->aq", Th, lift)) if N.x0 else F.zeros((0, U.dim))
        rho_bar = F.matmul(N.rho, TW.sect) if N.x1 and N.x0 else F.zeros((N.x1, W.dim))
        second = F.neg(F.matmul(V.proj, F.matmul(F.kron(rho_bar, F.eye(s)), U.sect)))
        f0 = np.concatenate([first, second], axis=0)
        f1 = F.neg(rho_bar)
        return ModuleMap(Src, Tgt, f0, f1)

    def _omega_inverse_map(self, N: SpeciesModule) -> ModuleMap:
        r, F = self.ring, self.F
        m, Ms, Y = r.m, self.Ms, self.Y
        s = Ms.dim
        # C0 = (N0, H + N1) with H = Hom_{D0}(M*, N0)
        Hb = commuting_maps(F, [(Ms.R, N.A0)], s, N.x0)
        Hs = Subspace(F, Hb, s * N.x0)
        h = Hs.dim

        def hvec(g):
            return Hs.coords(g.reshape(-1, 1) if g.ndim == 1 else g)

        if h:
            act = np.stack([F.matmul(Hs.basis[:, t].reshape(N.x0, s), Ms.L).ravel() for t in range(h)], axis=1)
            AH = hvec(act)
        else:
            AH = F.zeros((0, 0))
        A1C0 = F.zeros((h + N.x1, h + N.x1))
        A1C0[:h, :h] = AH
        A1C0[h:, h:] = N.A1
        Th = self._act(N.A0, r.theta_pair)  # (x', x, u, delta)
        if h and N.x0:
            gs = np.transpose(Th, (1, 2, 0, 3)).reshape(N.x0 * m, N.x0 * s).T.copy()
            rhoC0 = F.zeros((h + N.x1, N.x0 * m))
            rhoC0[:h] = hvec(gs)
        else:
            rhoC0 = F.zeros((h + N.x1, N.x0 * m))
        C0 = SpeciesModule(r, N.A0, A1C0, rhoC0, name="C0", check=False)
        # C1 = (G, K): G = Hom_{D1}(M, N1), K = Hom_{D1}(M* (x) M, N1)
        Gs = Subspace(F, commuting_maps(F, [(r.M.R, N.A1)], m, N.x1), m * N.x1)
        Ks = Subspace(F, commuting_maps(F, [(Y.bimodule.R, N.A1)], Y.dim, N.x1), Y.dim * N.x1)
        g, kk = Gs.dim, Ks.dim
        if g:
            AG = Gs.coords(np.stack([F.matmul(Gs.basis[:, t].reshape(N.x1, m), r.M.L).ravel()
                                     for t in range(g)], axis=1))
        else:
            AG = F.zeros((0, 0))
        if kk:
            AK = Ks.coords(np.stack([F.matmul(Ks.basis[:, t].reshape(N.x1, Y.dim), Y.bimodule.L).ravel()
                                     for t in range(kk)], axis=1))
        else:
            AK = F.zeros((0, 0))
        # (g (x) m')(delta (x) m) = g(theta(m')(delta) . m)
        # Z[m'] : kron(M*, M) -> M, (delta, mu) -> sum_c theta[c, m', delta] L^c e_mu
        Z = _red(F, np.einsum("cud,cab->uadb", r.theta_pair, self._LM))  # (m', a, delta, mu)
        Z = Z.reshape(m, m, s * m)
        rhoC1 = F.zeros((kk, g * m))
        if g and kk:
            cols = []
            for t in range(g):
                gm = Gs.basis[:, t].reshape(N.x1, m)
                for u in range(m):
                    cols.append(F.matmul(F.matmul(gm, Z[u]), Y.sect).ravel())
            rhoC1 = Ks.coords(np.stack(cols, axis=1))
        C1 = SpeciesModule(r, AG, AK, rhoC1, name="C1", check=False)
        # the map: x -> (m -> rho(x (x) m));  (g, y) -> (delta (x) m -> rho(g(delta) (x) m) - y . delta(m))
        if g and N.x0:
            f0 = Gs.coords(np.stack([N.rho[:, x * m:(x + 1) * m].ravel() for x in range(N.x0)], axis=1))
        else:
            f0 = F.zeros((g, N.x0))
        cols = []
        for t in range(h):
            gm = Hs.basis[:, t].reshape(N.x0, s)
            val = F.matmul(F.matmul(N.rho, F.kron(gm, F.eye(m))), Y.sect) if N.x1 else F.zeros((0, Y.dim))
            cols.append(val.ravel())
        Ev = self._act(N.A1, r.eval)  # (y', y, u, delta)
        for y in range(N.x1):
            val = F.neg(np.transpose(Ev[:, y, :, :], (0, 2, 1)).reshape(N.x1, s * m))
            cols.append(F.matmul(val, Y.sect).ravel())
        if kk and cols:
            f1 = Ks.coords(np.stack(cols, axis=1))
        else:
            f1 = F.zeros((kk, h + N.x1))
        return ModuleMap(C0, C1, f0, f1)

    def apply_omega(self, X) -> DerivedObject:
        """``X (x)^L omega``: a module in degree d contributes ker in degree d and coker in degree d+1."""
        if isinstance(X, SpeciesModule):
            X = DerivedObject.module(X)
        terms = []
        for N, d in X.normalized().terms:
            f = self._omega_map(N)
            terms.append((f.kernel(), d))
            terms.append((f.cokernel(), d + 1))
        return DerivedObject(terms).normalized()

    def apply_omega_inverse(self, X, return_maps: bool = False):
        """``X (x)^L omega^{-1} = RHom(DA, X)[1]``: ker in degree d-1, coker in degree d."""
        if isinstance(X, SpeciesModule):
            X = DerivedObject.module(X)
        terms, maps = [], []
        for N, d in X.normalized().terms:
            f = self._omega_inverse_map(N)
            maps.append(f)
            terms.append((f.kernel(), d - 1))
            terms.append((f.cokernel(), d))
        out = DerivedObject(terms).normalized()
        return (out, maps) if return_maps else out

    def twist(self, X, n: int) -> DerivedObject:
        """``X (x)^L omega^n``."""
        if isinstance(X, SpeciesModule):
            X = DerivedObject.module(X)
        for _ in range(abs(n)):
            X = self.apply_omega(X) if n > 0 else self.apply_omega_inverse(X)
        return X

    # -- preprojectives ---------------------------------------------------------
    def preprojective(self, i: int) -> SpeciesModule:
        if i in self._Pcache:
            return self._Pcache[i]
        S, r, F = self.S, self.ring, self.F
        if i >= -1:
            l = -i
            if l == 1:
                P = r.e1A()
            else:
                X, Yp = S.piece(l, 0), S.piece(l, 1)
                P = SpeciesModule(r, X.bimodule.R, Yp.bimodule.R, Yp.step, name=f"P{i}")
        else:
            l = -i - 2
            X = S.piece(0, l).bimodule
            D0s, B0 = _right_dual(X)
            if l == 0:
                P = SpeciesModule(r, D0s.R, F.zeros((0, 0)), F.zeros((0, 0)), name=f"P{i}")
            else:
                Yb = S.piece(1, l).bimodule
                D1s, B1 = _right_dual(Yb)
                mult = S.mult(0, 1, l).reshape(X.dim, r.m, Yb.dim)  # (a, u, t)
                d = B0.shape[0]
                # value[c, t] of psi_b(m_u . y_t)
                val = _red(F, np.einsum("aut,cab->butc", mult, B0))  # (b, u, t, c)
                A = np.transpose(B1, (1, 0, 2)).reshape(Yb.dim * d, D1s.dim)  # rows (t, c)
                rhs = val.reshape(D0s.dim * r.m, Yb.dim * d).T.copy()
                sol = F.solve(A, rhs)
                if sol is None:
                    raise RuntimeError("dual structure map not representable")
                P = SpeciesModule(r, D0s.R, D1s.R, sol, name=f"P{i}")
        self._Pcache[i] = P
        return P

    def L(self, i: int) -> DerivedObject:
        P = self.preprojective(i)
        return DerivedObject([(P, 0 if i >= -1 else 1)])

    # -- checks -------------------------------------------------------------------
    def derived_isomorphic(self, X: DerivedObject, Y: DerivedObject, seed: int = 0):
        """Degreewise explicit isomorphisms, or None."""
        X, Y = X.normalized(), Y.normalized()
        if X.degrees() != Y.degrees():
            return None
        out = []
        for d in X.degrees():
            iso = find_isomorphism(X.part(d), Y.part(d), seed=seed)
            if iso is None:
                return None
            out.append((d, iso))
        return out

    def verify_tilt_recursion(self, imin: int, imax: int, seed: int = 0) -> VerificationReport:
        t0 = time.perf_counter()
        details, bad = [], None
        for i in range(imin, imax + 1):
            Li, Lt = self.L(i), self.L(i + 2)
            img, maps = self.apply_omega_inverse(Li, return_maps=True)
            phi = maps[0]
            inj = phi.is_injective()
            fwd = self.derived_isomorphic(img, Lt, seed)
            back = self.derived_isomorphic(self.apply_omega(Lt), Li, seed)
            det = {"i": i, "L_i": [list(N.kdims) + [d] for N, d in Li.terms],
                   "image": [list(N.kdims) + [d] for N, d in img.terms],
                   "phi_injective": inj, "forward_iso": fwd is not None, "backward_iso": back is not None}
            ok = fwd is not None and back is not None
            # phi is injective for i >= -1 and i <= -4; for i = -2, -3 its kernel is the answer
            if i >= -1 or i <= -4:
                ok = ok and inj
            details.append(det)
            if not ok and bad is None:
                bad = det
        return VerificationReport("tilt", bad is None, {"imin": imin, "imax": imax}, details, bad,
                                  timing=time.perf_counter() - t0)

    def is_regular(self, X: SpeciesModule, window: int = 4, dim_cap: int = 150):
        """All twists ``X (x) omega^n``, ``|n| <= window``, are modules (degree 0).

        On wild instances twists grow exponentially; a direction stops early
        once the k-dimension passes ``dim_cap`` and ``evidence["capped"]``
        records the last step reached in each direction.
        """
        evidence = {}
        ok = True
        for sign in (1, -1):
            Y = DerivedObject.module(X)
            for n in range(1, window + 1):
                if sum(sum(N.kdims) for N, _ in Y.terms) > dim_cap:
                    evidence.setdefault("capped", {})[sign] = sign * (n - 1)
                    break
                Y = self.apply_omega(Y) if sign > 0 else self.apply_omega_inverse(Y)
                evidence[sign * n] = [list(N.kdims) + [d] for N, d in Y.terms]
                if not Y.is_module():
                    ok = False
                    break
            if not ok:
                break
        return ok, evidence


def regular_module(ring: SpeciesRing, functionals, name: str = "R") -> SpeciesModule:
    """``(D0, D1^r)`` with ``rho(a (x) m) = (delta_1(a m), ..., delta_r(a m))`` for ``delta_j`` in M*."""
    F = ring.F
    d0 = ring.D0.degree
    mu = ring.e0A().rho  # kron(D0, M) -> M
    rows = []
    for delta in functionals:
        # delta(v)_c = sum_u eval[c, u, delta] v_u
        ev = _red(F, np.tensordot(ring.eval, delta, axes=([2], [0])))  # (c, u)
        rows.append(F.matmul(ev, mu))
    rho = np.concatenate(rows, axis=0)
    A1 = F.kron(F.eye(len(functionals)), ring.D1.companion)
    return SpeciesModule(ring, ring.D0.companion, A1, rho, name=name)
