"""The graded vertex-operator product engine, exact over Q.

Modes are computed monomial-by-monomial:

  * for a = e^alpha the exponential formula
        Y(e^a, z) = E^-(-a, z) E^+(-a, z) e_a z^a
    is expanded with the cocycle sign, the z^{<a,beta>} shift, the creation
    coefficients s_{a,p} and the annihilation coefficients applied to the
    target's Heisenberg part;
  * for a = h(-m)u the normal-ordered iterate
        Y(h(-m)u, z) = :d^(m-1)h(z)/(m-1)! Y(u,z):
    splits into creation modes (k < 0) on the left and annihilation modes
    (k >= 0, including h(0)) on the right.

Everything else (Virasoro element, involutions and diagram-symmetry lifts,
the invariant-form surrogate, generator exponentials) sits on top of this.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .fock import (
    Mono,
    Parts,
    el_add,
    el_iadd,
    el_scale,
    el_sub,
    fock_basis,
    insert_part,
    mono_weight,
    remove_once,
    vacuum_mono,
)
from .rootdata import CocycleTable, GraphAut, RootLattice, Vec, build_cocycle


def binom(n: int, k: int) -> int:
    """Binomial coefficient with arbitrary integer top, k >= 0."""
    if k < 0:
        return 0
    num = 1
    for t in range(k):
        num *= n - t
    den = 1
    for t in range(2, k + 1):
        den *= t
    assert num % den == 0
    return num // den


class VertexEngine:
    """Products, special elements and morphisms of one lattice VA over Q."""

    def __init__(self, lattice: RootLattice, cocycle: CocycleTable | None = None,
                 wmax: int = 4):
        self.lattice = lattice
        self.rank = lattice.rank
        self.cocycle = cocycle if cocycle is not None else build_cocycle(lattice)
        self.wmax = wmax
        self.vacuum = vacuum_mono(self.rank)
        self._mode_cache: dict[tuple[Mono, int, Mono], dict] = {}
        self._basis_cache: dict[int, list[Mono]] = {}

    # ----------------------------------------------------------- bookkeeping

    def weight(self, m: Mono) -> int:
        return mono_weight(m, self.lattice)

    def el_weight(self, el: dict) -> int | None:
        """Common weight of a homogeneous element (None for 0, error if mixed)."""
        ws = {self.weight(m) for m in el}
        if not ws:
            return None
        if len(ws) > 1:
            raise ValueError(f"element is not homogeneous: weights {sorted(ws)}")
        return ws.pop()

    def basis(self, n: int) -> list[Mono]:
        if n > self.wmax:
            raise ValueError(f"weight {n} exceeds truncation wmax={self.wmax}")
        if n not in self._basis_cache:
            self._basis_cache[n] = fock_basis(self.lattice, n)
        return self._basis_cache[n]

    def basis_index(self, n: int):
        return {m: i for i, m in enumerate(self.basis(n))}

    def ip_coord(self, alpha: Vec, i: int) -> int:
        """<alpha, a_i> in simple-root coordinates."""
        return sum(a * g for a, g in zip(alpha, [row[i] for row in self.lattice.gram]))

    # ------------------------------------------------------------- operators

    def annihilate(self, alpha: Vec, k: int, heis: dict) -> dict:
        """Apply alpha(k), k >= 1, to a dict of Heisenberg parts-tuples."""
        out: dict[Parts, Fraction] = {}
        for parts, c in heis.items():
            seen = set()
            for entry in parts:
                if entry in seen:
                    continue
                seen.add(entry)
                n, i = entry
                if n != k:
                    continue
                mult = parts.count(entry)
                pair = self.ip_coord(alpha, i)
                if not pair:
                    continue
                coeff = c * mult * k * pair
                rest = remove_once(parts, entry)
                cur = out.get(rest)
                out[rest] = coeff if cur is None else cur + coeff
                if out[rest] == 0:
                    del out[rest]
        return out

    def create(self, alpha: Vec, k: int, heis: dict) -> dict:
        """Apply alpha(-k), k >= 1 (free creation), to Heisenberg parts."""
        out: dict[Parts, Fraction] = {}
        for parts, c in heis.items():
            for i, a in enumerate(alpha):
                if a:
                    p2 = insert_part(parts, k, i)
                    cur = out.get(p2)
                    v = c * a
                    out[p2] = v if cur is None else cur + v
                    if out[p2] == 0:
                        del out[p2]
        return out

    @lru_cache(maxsize=None)
    def s_poly_parts(self, alpha: Vec, n: int) -> tuple:
        """s_{alpha,n}: coefficient of z^n in exp(sum alpha(-k)/k z^k).

        Returned as ((parts, Fraction), ...); satisfies the Newton recursion
        n s_n = sum_{k=1..n} alpha(-k) s_{n-k}.
        """
        if n == 0:
            return (((), Fraction(1)),)
        acc: dict[Parts, Fraction] = {}
        for k in range(1, n + 1):
            prev = dict(self.s_poly_parts(alpha, n - k))
            for parts, c in self.create(alpha, k, prev).items():
                cur = acc.get(parts)
                acc[parts] = c if cur is None else cur + c
        out = {p: c / n for p, c in acc.items() if c}
        return tuple(sorted(out.items()))

    def s_poly(self, alpha: Vec, n: int) -> dict:
        """s_{alpha,n} as an element (Heisenberg monomials over e^0)."""
        zero = (0,) * self.rank
        return {Mono(p, zero): c for p, c in self.s_poly_parts(tuple(alpha), n)}

    # --------------------------------------------------------------- product

    def mono_mode(self, a: Mono, n: int, b: Mono) -> dict:
        key = (a, n, b)
        hit = self._mode_cache.get(key)
        if hit is not None:
            return hit
        out = self._mono_mode(a, n, b)
        want = self.weight(a) + self.weight(b) - n - 1
        assert all(self.weight(m) == want for m in out), "weight bookkeeping broken"
        self._mode_cache[key] = out
        return out

    def _mono_mode(self, a: Mono, n: int, b: Mono) -> dict:
        if self.weight(a) + self.weight(b) - n - 1 < 0:
            return {}
        if not a.parts:
            return self._exp_mode(a.point, n, b)
        (m, i), rest = a.parts[0], a.parts[1:]
        u = Mono(rest, a.point)
        alpha_i = tuple(int(j == i) for j in range(self.rank))
        out: dict[Mono, Fraction] = {}
        # annihilation side: u_{n-k-m} after alpha_i(k), k >= 0
        c0 = self.ip_coord(b.point, i)
        if c0:
            coef = binom(-1, m - 1) * c0
            for mono2, c2 in self.mono_mode(u, n - m, b).items():
                el_iadd(out, mono2, coef * c2)
        maxk = b.depth()
        for k in range(1, maxk + 1):
            coef = binom(-k - 1, m - 1)
            if not coef:
                continue
            hit = self.annihilate(alpha_i, k, {b.parts: Fraction(1)})
            for parts2, c2 in hit.items():
                for mono3, c3 in self.mono_mode(u, n - k - m, Mono(parts2, b.point)).items():
                    el_iadd(out, mono3, coef * c2 * c3)
        # creation side: alpha_i(k), k < 0, after u_{n-k-m}
        kmin = n - m - self.weight(u) - self.weight(b) + 1
        for k in range(kmin, 0):
            coef = binom(-k - 1, m - 1)
            if not coef:
                continue
            inner = self.mono_mode(u, n - k - m, b)
            for mono2, c2 in inner.items():
                el_iadd(out, Mono(insert_part(mono2.parts, -k, i), mono2.point), coef * c2)
        return out

    def _exp_mode(self, alpha: Vec, n: int, b: Mono) -> dict:
        if not any(alpha):
            return {b: Fraction(1)} if n == -1 else {}
        beta = b.point
        sign = self.cocycle.eps(alpha, beta)
        c0 = self.lattice.ip(alpha, beta)
        newpt = tuple(x + y for x, y in zip(alpha, beta))
        out: dict[Mono, Fraction] = {}
        levels = self._nd_levels(tuple(alpha), b.parts)
        for d, nd in enumerate(levels):
            p = d - n - 1 - c0
            if p < 0:
                continue
            for parts_s, cs in self.s_poly_parts(tuple(alpha), p):
                for parts_b, cb in nd:
                    merged = tuple(sorted(list(parts_s) + list(parts_b), reverse=True))
                    el_iadd(out, Mono(merged, newpt), sign * cs * cb)
        return out

    @lru_cache(maxsize=None)
    def _nd_levels(self, alpha: Vec, parts: Parts) -> tuple:
        """N_d = coeff of z^{-d} in exp(-sum_{k>0} alpha(k)/k z^{-k}) on parts."""
        levels: list[dict[Parts, Fraction]] = [{parts: Fraction(1)}]
        total = sum(n for n, _ in parts)
        for d in range(1, total + 1):
            acc: dict[Parts, Fraction] = {}
            for m in range(1, d + 1):
                hit = self.annihilate(alpha, m, levels[d - m])
                for p2, c2 in hit.items():
                    cur = acc.get(p2)
                    v = -c2
                    acc[p2] = v if cur is None else cur + v
            levels.append({p: c / d for p, c in acc.items() if c})
        return tuple(tuple(sorted(lvl.items())) for lvl in levels)

    def product(self, x: dict, n: int, y: dict) -> dict:
        """Mode product x_n y for elements; bilinear over the coefficients."""
        out: dict[Mono, object] = {}
        for ma, ca in x.items():
            for mb, cb in y.items():
                c = ca * cb
                for m2, c2 in self.mono_mode(ma, n, mb).items():
                    el_iadd(out, m2, c * c2)
        return out

    # ------------------------------------------------------ special elements

    def virasoro(self) -> dict:
        """omega = 1/2 sum G^{-1}_{ij} a_i(-1) a_j(-1)."""
        ginv = _fraction_inverse(self.lattice.gram)
        zero = (0,) * self.rank
        out: dict[Mono, Fraction] = {}
        for i in range(self.rank):
            for j in range(i, self.rank):
                c = ginv[i][j] if i != j else ginv[i][i] / 2
                if c:
                    el_iadd(out, Mono(insert_part(((1, j),), 1, i), zero), c)
        return out

    def translation(self, el: dict) -> dict:
        """T = L(-1) via omega_0."""
        return self.product(self.virasoro(), 0, el)

    def l_op(self, m: int, el: dict) -> dict:
        return self.product(self.virasoro(), m + 1, el)

    # ----------------------------------------------------------- morphisms

    def theta(self, el: dict) -> dict:
        out = {}
        for mono, c in el.items():
            sgn = -1 if len(mono.parts) % 2 else 1
            el_iadd(out, Mono(mono.parts, tuple(-x for x in mono.point)), sgn * c)
        return out

    def gamma_lift(self, aut: GraphAut):
        """Monomial-level lift of a diagram symmetry (needs matching cocycle)."""
        if self.cocycle.aut is not aut:
            raise ValueError("engine cocycle was not built with this automorphism")
        cz = self.cocycle

        def fn(el: dict) -> dict:
            out: dict[Mono, object] = {}
            for mono, c in el.items():
                parts = tuple(sorted(((n, aut.perm[i]) for n, i in mono.parts), reverse=True))
                el_iadd(out, Mono(parts, aut.apply(mono.point)), cz.eta(mono.point) * c)
            return out

        return fn

    def conjugation_twist(self, el: dict) -> dict:
        """theta composed with coefficient conjugation (the compact-form fix)."""
        out = {}
        for mono, c in self.theta(el).items():
            el_iadd(out, mono, c.conjugate() if hasattr(c, "conjugate") else c)
        return out

    def exp_zero_mode(self, root: Vec, t, el: dict) -> dict:
        """exp(t (e^root)_0) applied to an element; the mode is nilpotent."""
        e_root = {Mono((), tuple(root)): Fraction(1)}
        acc = dict(el)
        cur = el
        tk = None
        k = 0
        while cur:
            k += 1
            if k > 64:
                raise ArithmeticError("zero mode failed to nilpotate")
            cur = {m: c / k for m, c in self.product(e_root, 0, cur).items()}
            tk = t if k == 1 else tk * t
            acc = el_add(acc, {m: tk * c for m, c in cur.items()})
        return acc

    def virasoro_check(self, m: int, n: int, wmax: int | None = None) -> dict:
        """[L(m), L(n)] = (m-n) L(m+n) + binom(m+1,3) delta_{m+n,0} c' with
        2c' = rank, verified on every basis state of weight <= wmax."""
        wmax = wmax if wmax is not None else self.wmax
        central = Fraction(self.rank, 2) * binom(m + 1, 3)
        for w in range(wmax + 1):
            for mono in self.basis(w):
                x = {mono: Fraction(1)}
                lhs = el_sub(self.l_op(m, self.l_op(n, x)), self.l_op(n, self.l_op(m, x)))
                rhs = el_scale(self.l_op(m + n, x), Fraction(m - n))
                if m + n == 0 and central:
                    rhs = el_add(rhs, el_scale(x, central))
                if el_sub(lhs, rhs):
                    return {"m": m, "n": n, "ok": False, "witness": repr(mono)}
        return {"m": m, "n": n, "ok": True}

    # ------------------------------------------------------------ form

    def pairing(self, a: Mono, b: Mono) -> int:
        """Positive-convention form: monomials orthogonal, <e^a, e^b> = delta."""
        if a.point != b.point:
            return 0
        return self._heis_pairing(a.parts, b.parts)

    def _heis_pairing(self, p1: Parts, p2: Parts) -> int:
        if not p1:
            return 1 if not p2 else 0
        if len(p1) != len(p2):
            return 0
        (n, i) = p1[0]
        rest1 = p1[1:]
        total = 0
        seen = set()
        for entry in p2:
            if entry in seen:
                continue
            seen.add(entry)
            m, j = entry
            if m != n:
                continue
            total += p2.count(entry) * n * self.lattice.gram[i][j] * self._heis_pairing(
                rest1, remove_once(p2, entry)
            )
        return total

    def form(self, x: dict, y: dict, hermitian: bool = False):
        tot = None
        for ma, ca in x.items():
            for mb, cb in y.items():
                p = self.pairing(ma, mb)
                if p:
                    c1 = ca.conjugate() if hermitian and hasattr(ca, "conjugate") else ca
                    t = c1 * cb * p
                    tot = t if tot is None else tot + t
        return tot if tot is not None else Fraction(0)


def _fraction_inverse(mat) -> list[list[Fraction]]:
    n = len(mat)
    A = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(mat)]
    for col in range(n):
        piv = next(i for i in range(col, n) if A[i][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        d = A[col][col]
        A[col] = [v / d for v in A[col]]
        for i in range(n):
            if i != col and A[i][col]:
                c = A[i][col]
                A[i] = [v - c * w for v, w in zip(A[i], A[col])]
    return [row[n:] for row in A]
