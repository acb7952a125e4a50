"""Standard integral forms of lattice vertex algebras, per weight.

The weight-n piece is the Z-span of all products
s_{b_1,n_1} ... s_{b_k,n_k} (x) e^b with the b_i, b lattice points.  A finite
spanning set suffices: polynomial maps of degree <= n on the lattice are
Z-spanned by their values on the simplex {sum m_i a_i : m_i >= 0, sum m_i <= n}
(Newton forward differences in several variables), and products expand
multilinearly over those generators.

On top of the graded lattices sit: a mod-p graded structure with integer
product structure constants, signed-permutation morphism matrices, the
Z[1/2,i] fixed-point real form, and the spin closure used both for
subalgebra generation and as an independent cross-check of the spanning set.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from math import gcd

import numpy as np

from .fock import Mono, el_iadd, mono_sort_key
from .linalg import ZModule, hnf_basis, kernel_int, solve_int
from .rootdata import GraphAut, Vec
from .vertex import VertexEngine


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


class GradedZModule:
    """An integer lattice inside one weight space, in denominator-cleared HNF."""

    def __init__(self, engine: VertexEngine, weight: int, elements):
        self.engine = engine
        self.weight = weight
        self.monos = tuple(engine.basis(weight))
        self._index = {m: i for i, m in enumerate(self.monos)}
        denom = 1
        vecs = []
        for el in elements:
            v = self._fraction_vector(el)
            vecs.append(v)
            for c in v.values():
                denom = _lcm(denom, c.denominator)
        self.denom = denom
        rows = [{j: int(c * denom) for j, c in v.items()} for v in vecs]
        self.rows = hnf_basis(rows, len(self.monos))

    def _fraction_vector(self, el: dict) -> dict[int, Fraction]:
        out = {}
        for mono, c in el.items():
            idx = self._index.get(mono)
            if idx is None:
                raise ValueError(f"monomial {mono} not of weight {self.weight}")
            out[idx] = Fraction(c)
        return out

    @property
    def rank(self) -> int:
        return len(self.rows)

    def coords(self, el: dict):
        """Integer coordinates of an element in this basis, or None."""
        v = self._fraction_vector(el)
        target = {}
        for j, c in v.items():
            t = c * self.denom
            if t.denominator != 1:
                return None
            target[j] = int(t)
        return solve_int(self.rows, target)

    def contains(self, el: dict) -> bool:
        return self.coords(el) is not None

    def element(self, coords) -> dict:
        out: dict[Mono, Fraction] = {}
        if isinstance(coords, dict):
            items = coords.items()
        else:
            items = ((i, c) for i, c in enumerate(coords) if c)
        for i, c in items:
            for j, v in self.rows[i].items():
                el_iadd(out, self.monos[j], Fraction(c * v, self.denom))
        return out

    def scaled_rows(self, denom: int) -> list[dict[int, int]]:
        assert denom % self.denom == 0
        f = denom // self.denom
        return [{j: v * f for j, v in r.items()} for r in self.rows]

    def same_span(self, other: "GradedZModule") -> bool:
        if self.monos != other.monos:
            return False
        d = _lcm(self.denom, other.denom)
        return hnf_basis(self.scaled_rows(d), len(self.monos)) == hnf_basis(
            other.scaled_rows(d), len(self.monos)
        )

    def zmodule(self, denom: int | None = None) -> ZModule:
        return ZModule(self.scaled_rows(denom or self.denom), len(self.monos))


def simplex_points(basis: list[Vec], n: int, rank: int) -> list[Vec]:
    """Nonzero points sum m_k b_k with m_k >= 0 and sum m_k <= n."""
    out = []
    k = len(basis)
    for total in range(1, n + 1):
        for comp in itertools.combinations_with_replacement(range(k), total):
            pt = [0] * rank
            for idx in comp:
                for j, c in enumerate(basis[idx]):
                    pt[j] += c
            out.append(tuple(pt))
    return sorted(set(out))


def _partitions(n: int):
    if n == 0:
        yield ()
        return
    for first in range(n, 0, -1):
        for rest in _partitions(n - first):
            if not rest or rest[0] <= first:
                yield (first,) + rest


class IntegralForm:
    """The standard integral form of the engine's lattice VA."""

    def __init__(self, engine: VertexEngine, wmax: int | None = None):
        self.engine = engine
        self.lattice = engine.lattice
        self.wmax = wmax if wmax is not None else engine.wmax
        self._basis: dict[int, GradedZModule] = {}
        # Sublattice data: identity embedding by default.
        self._sub_basis = [tuple(r) for r in self.lattice.simple_roots]

    def generators(self, n: int, sub_basis: list[Vec] | None = None,
                   sub_gram=None) -> list[dict]:
        """Spanning elements of weight n (optionally of a sublattice form)."""
        eng = self.engine
        if sub_basis is None:
            points = eng.lattice.vectors_up_to_norm(2 * n)
        else:
            points = _sublattice_points(eng.lattice, sub_basis, 2 * n)
        basis = sub_basis if sub_basis is not None else self._sub_basis
        out = []
        for pt in points:
            m = n - eng.lattice.norm(pt) // 2
            for lam in _partitions(m):
                groups: dict[int, int] = {}
                for part in lam:
                    groups[part] = groups.get(part, 0) + 1
                choices = []
                for part, cnt in sorted(groups.items()):
                    pts = simplex_points(basis, part, eng.rank)
                    choices.append(list(itertools.combinations_with_replacement(pts, cnt)))
                for combo in itertools.product(*choices):
                    el = {Mono((), pt): Fraction(1)}
                    for (part, _), picks in zip(sorted(groups.items()), combo):
                        for beta in picks:
                            el = _mul_heis(eng, el, eng.s_poly_parts(beta, part))
                    if el:
                        out.append(el)
        return out

    def basis(self, n: int) -> GradedZModule:
        if n > self.wmax:
            raise ValueError(f"weight {n} exceeds wmax={self.wmax}")
        if n not in self._basis:
            gz = GradedZModule(self.engine, n, self.generators(n))
            dim = len(self.engine.basis(n))
            assert gz.rank == dim, f"integral form not full rank at weight {n}"
            self._basis[n] = gz
        return self._basis[n]

    def contains(self, el: dict) -> bool:
        w = self.engine.el_weight(el)
        if w is None:
            return True
        return self.basis(w).contains(el)

    def coords(self, el: dict, weight: int):
        return self.basis(weight).coords(el)

    def sublattice_module(self, aut: GraphAut, n: int) -> GradedZModule:
        """IV of the fixed sublattice, embedded in this Fock space at weight n."""
        gens = self.generators(n, sub_basis=[tuple(b) for b in aut.fixed_basis])
        return GradedZModule(self.engine, n, gens)

    def morphism_matrix(self, fn, n: int) -> list[dict[int, int]]:
        """Rows: integer IV-coordinates of fn(basis element); asserts stability."""
        gz = self.basis(n)
        rows = []
        for i in range(gz.rank):
            img = fn(gz.element({i: 1}))
            c = gz.coords(img)
            assert c is not None, "morphism does not preserve the integral form"
            rows.append({j: v for j, v in enumerate(c) if v})
        return rows

    def generator_divided_powers(self, root: Vec, weight: int) -> list[np.ndarray]:
        """Integer matrices of ((e^root)_0)^k / k! on the weight space.

        Rows = images of the integral basis, in integral coordinates; a
        non-integral entry signals a structure bug and raises.
        """
        gz = self.basis(weight)
        eng = self.engine
        e_root = {Mono((), tuple(root)): Fraction(1)}
        dim = gz.rank
        powers = [np.eye(dim, dtype=np.int64)]
        current = [gz.element({i: 1}) for i in range(dim)]
        k = 0
        while True:
            k += 1
            if k > 64:
                raise ArithmeticError("zero mode failed to nilpotate")
            current = [
                {m: c / k for m, c in eng.product(e_root, 0, el).items()}
                for el in current
            ]
            if not any(current):
                return powers
            M = np.zeros((dim, dim), dtype=np.int64)
            for i, el in enumerate(current):
                if not el:
                    continue
                coords = gz.coords(el)
                if coords is None:
                    raise ArithmeticError(
                        f"non-integral divided power k={k} for root {root} at weight {weight}"
                    )
                M[i] = coords
            powers.append(M)

    def generator_matrix_int(self, root: Vec, weight: int, t: int = 1) -> np.ndarray:
        out = np.zeros(0, dtype=np.int64)
        for k, P in enumerate(self.generator_divided_powers(root, weight)):
            out = (t ** k) * P if k == 0 else out + (t ** k) * P
        return out

    def min_virasoro_multiple(self, bound: int = 64) -> int:
        """Least s >= 1 with s*omega in the integral form (weight 2)."""
        omega = self.engine.virasoro()
        gz = self.basis(2)
        for s in range(1, bound + 1):
            if gz.contains({m: c * s for m, c in omega.items()}):
                return s
        raise ValueError(f"no multiple of omega up to {bound} lies in the form")


def _sublattice_points(lattice, sub_basis: list[Vec], norm_bound: int) -> list[Vec]:
    from .rootdata import enumerate_by_gram

    gram = [[lattice.ip(a, b) for b in sub_basis] for a in sub_basis]
    pts = enumerate_by_gram(gram, norm_bound)
    out = []
    for c in pts:
        v = [0] * lattice.rank
        for coef, b in zip(c, sub_basis):
            for j, x in enumerate(b):
                v[j] += coef * x
        out.append(tuple(v))
    return sorted(set(out))


def _mul_heis(engine: VertexEngine, el: dict, parts_poly) -> dict:
    """Multiply an element by a polynomial in creation operators."""
    out: dict[Mono, Fraction] = {}
    for mono, c in el.items():
        for parts, cs in parts_poly:
            merged = tuple(sorted(list(parts) + list(mono.parts), reverse=True))
            el_iadd(out, Mono(merged, mono.point), c * cs)
    return out


# ------------------------------------------------------------ spin closure


def spin_closure(engine: VertexEngine, seeds: dict[int, list[dict]], wmax: int,
                 max_rounds: int = 12) -> dict[int, GradedZModule]:
    """Smallest graded Z-span containing the seeds and closed under products.

    seeds: weight -> list of elements.  The vacuum is always included.
    Iterates products of current basis elements until the lattices stop
    growing.  Used for subalgebra generation and as the independent check
    that weight-1 data generates the whole integral form.
    """
    from .fock import vacuum_mono

    current: dict[int, GradedZModule] = {}
    els: dict[int, list[dict]] = {w: list(v) for w, v in seeds.items()}
    els.setdefault(0, []).append({vacuum_mono(engine.rank): Fraction(1)})
    for w in range(wmax + 1):
        current[w] = GradedZModule(engine, w, els.get(w, []))
    for _ in range(max_rounds):
        changed = False
        basis_els = {
            w: [current[w].element({i: 1}) for i in range(current[w].rank)]
            for w in range(wmax + 1)
        }
        for wa in range(wmax + 1):
            for wb in range(wmax + 1):
                for target in range(wmax + 1):
                    nmode = wa + wb - target - 1
                    for u in basis_els[wa]:
                        for v in basis_els[wb]:
                            prod = engine.product(u, nmode, v)
                            if prod:
                                els.setdefault(target, []).append(prod)
        for w in range(wmax + 1):
            new = GradedZModule(engine, w, els.get(w, []))
            if not new.same_span(current[w]):
                current[w] = new
                changed = True
        if not changed:
            return current
    raise RuntimeError("spin closure did not stabilize")


def subva_generated(engine: VertexEngine, weight1: list[dict], wmax: int) -> dict[int, GradedZModule]:
    """Graded integral form of the subVA generated by weight-1 elements."""
    return spin_closure(engine, {1: list(weight1)}, wmax)


# ----------------------------------------------------------- mod-p structure


class GradedFpVA:
    """The integral form reduced mod p: F_p coordinates with exact products.

    Products of integral-form basis elements have integer coordinates in the
    target basis (closure); those structure vectors are computed over Q once
    and reduced, so all mod-p arithmetic downstream is honest F_p work.
    """

    def __init__(self, form: IntegralForm, p: int, wmax: int | None = None):
        self.form = form
        self.engine = form.engine
        self.p = p
        self.wmax = wmax if wmax is not None else form.wmax
        self._prod_cache: dict[tuple[int, int, int, int], np.ndarray] = {}

    def dim(self, w: int) -> int:
        if w < 0 or w > self.wmax:
            return 0
        return self.form.basis(w).rank

    def product_coords(self, wa: int, ia: int, n: int, wb: int, ib: int) -> np.ndarray:
        """F_p coordinates of (basis_ia at wa)_n (basis_ib at wb)."""
        target = wa + wb - n - 1
        key = (wa, ia, n, wb, ib)
        hit = self._prod_cache.get(key)
        if hit is not None:
            return hit
        out = np.zeros(self.dim(target), dtype=np.int64)
        if 0 <= target <= self.wmax:
            ga, gb = self.form.basis(wa), self.form.basis(wb)
            prod = self.engine.product(ga.element({ia: 1}), n, gb.element({ib: 1}))
            if prod:
                c = self.form.basis(target).coords(prod)
                assert c is not None, "integral form not closed under this product"
                out = np.array(c, dtype=np.int64) % self.p
        self._prod_cache[key] = out
        return out

    def mode_product(self, va: np.ndarray, wa: int, n: int, vb: np.ndarray, wb: int) -> np.ndarray:
        """x_n y for F_p coordinate vectors at weights wa, wb."""
        target = wa + wb - n - 1
        out = np.zeros(self.dim(target), dtype=np.int64)
        if target < 0 or target > self.wmax:
            return out
        for ia in np.nonzero(va)[0]:
            for ib in np.nonzero(vb)[0]:
                c = int(va[ia]) * int(vb[ib])
                out = (out + c * self.product_coords(wa, int(ia), n, wb, int(ib))) % self.p
        return out

    def reduce_element(self, el: dict, w: int) -> np.ndarray:
        c = self.form.coords(el, w)
        assert c is not None, "element is not in the integral form"
        return np.array(c, dtype=np.int64) % self.p

    def morphism_modp(self, fn, w: int) -> np.ndarray:
        rows = self.form.morphism_matrix(fn, w)
        d = self.dim(w)
        M = np.zeros((d, d), dtype=np.int64)
        for i, r in enumerate(rows):
            for j, v in r.items():
                M[i, j] = v % self.p
        return M


# ------------------------------------------------------------- Z[1/2,i] form


class RealFormZ12:
    """Fixed points of theta composed with coefficient conjugation on R (x) IV.

    Basis per weight: real kernel of (T - 1) plus sqrt(-1) times the kernel
    of (T + 1), where T is the integer matrix of the theta involution on the
    integral-form basis.  Coefficients live in Z[1/2]; the Gram matrix of the
    basis under the conjugate-symmetric form is rational.
    """

    def __init__(self, form: IntegralForm, wmax: int | None = None):
        from .rings import GAUSS_I, GaussQ

        self.form = form
        self.engine = form.engine
        self.wmax = wmax if wmax is not None else form.wmax
        self._gauss_i = GAUSS_I
        self._basis: dict[int, list[dict]] = {}
        self._theta_mat: dict[int, list[dict[int, int]]] = {}

    def theta_matrix(self, w: int) -> list[dict[int, int]]:
        if w not in self._theta_mat:
            self._theta_mat[w] = self.form.morphism_matrix(self.engine.theta, w)
        return self._theta_mat[w]

    def basis(self, w: int) -> list[dict]:
        """Tilde-form basis elements (GaussQ coefficients) at weight w."""
        if w in self._basis:
            return self._basis[w]
        from .rings import GaussQ

        gz = self.form.basis(w)
        T = self.theta_matrix(w)
        d = gz.rank
        plus_rows = [_row_sub(T[i], {i: 1}) for i in range(d)]
        minus_rows = [_row_add(T[i], {i: 1}) for i in range(d)]
        fix_plus = kernel_int(plus_rows, d)    # T x = x
        fix_minus = kernel_int(minus_rows, d)  # T x = -x
        out = []
        one = GaussQ(Fraction(1), Fraction(0))
        for row in fix_plus:
            el = {}
            for mono, c in gz.element(row).items():
                el_iadd(el, mono, one * c)
            out.append(el)
        for row in fix_minus:
            el = {}
            for mono, c in gz.element(row).items():
                el_iadd(el, mono, self._gauss_i * c)
            out.append(el)
        self._basis[w] = out
        return out

    def is_fixed(self, el: dict) -> bool:
        return not _el_nonzero(_el_sub_gq(self.engine.conjugation_twist(el), el))

    def gram(self, w: int):
        """Rational Gram matrix of the weight-w basis (conjugate-symmetric)."""
        b = self.basis(w)
        out = []
        for x in b:
            row = []
            for y in b:
                v = self.engine.form(x, y, hermitian=True)
                if hasattr(v, "im"):
                    assert v.im == 0, "tilde Gram entry not real"
                    v = v.re
                row.append(Fraction(v))
            out.append(row)
        return out


def _row_add(a: dict[int, int], b: dict[int, int]) -> dict[int, int]:
    out = dict(a)
    for j, v in b.items():
        w = out.get(j, 0) + v
        if w:
            out[j] = w
        else:
            out.pop(j, None)
    return out


def _row_sub(a: dict[int, int], b: dict[int, int]) -> dict[int, int]:
    return _row_add(a, {j: -v for j, v in b.items()})


def _el_sub_gq(a: dict, b: dict) -> dict:
    out = dict(a)
    for m, c in b.items():
        el_iadd(out, m, -c)
    return out


def _el_nonzero(el: dict) -> bool:
    return any(bool(c) for c in el.values())


def positive_definite(gram) -> bool:
    """Exact leading-principal-minor test for a rational symmetric matrix."""
    from .linalg import det_int

    n = len(gram)
    denom = 1
    for row in gram:
        for v in row:
            denom = _lcm(denom, Fraction(v).denominator)
    M = [[int(Fraction(v) * denom) for v in row] for row in gram]
    for k in range(1, n + 1):
        if det_int([row[:k] for row in M[:k]]) <= 0:
            return False
    return True
