"""Chevalley-basis Lie algebras over the supported rings.

Basis: h_1..h_r (coroot directions, identified with simple-root coordinates
in the simply-laced case) followed by e_alpha for each root.  All structure
constants are integers determined by the sign cocycle:

    [h_i, e_a] = <a_i, a> e_a
    [e_a, e_b] = eps(a, b) e_{a+b}   when <a, b> = -1
    [e_a, e_{-a}] = eps(a, -a) h_a
    all other root brackets vanish.

Heavy characteristic-p work (fixed points, norm ideals, quotients) runs on
integer matrices reduced mod p via numpy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .linalg import kernel_modp, rref_modp
from .rings import Ring, PrimeField, QQ, ZZ
from .rootdata import (
    CocycleTable,
    GraphAut,
    RootLattice,
    Vec,
    build_cocycle,
    build_root_lattice,
    graph_automorphism,
)


class ChevalleyAlgebra:
    def __init__(self, lattice: RootLattice, ring: Ring, cocycle: CocycleTable | None = None):
        self.lattice = lattice
        self.ring = ring
        self.cocycle = cocycle if cocycle is not None else build_cocycle(lattice)
        self.rank = lattice.rank
        self.labels = [("h", i) for i in range(self.rank)] + [("e", r) for r in lattice.roots]
        self.dim = len(self.labels)
        self._root_index = {r: self.rank + k for k, r in enumerate(lattice.roots)}
        self._bracket_cache: dict[tuple[int, int], dict[int, int]] = {}

    def root_of(self, idx: int) -> Vec:
        kind, payload = self.labels[idx]
        if kind != "e":
            raise ValueError("not a root-vector index")
        return payload

    def index(self, label) -> int:
        if label[0] == "h":
            return label[1]
        return self._root_index[label[1]]

    # ------------------------------------------------------ integer brackets

    def bracket_ints(self, i: int, j: int) -> dict[int, int]:
        """[basis_i, basis_j] as a sparse integer vector."""
        if (i, j) in self._bracket_cache:
            return self._bracket_cache[(i, j)]
        out = self._bracket_raw(i, j)
        self._bracket_cache[(i, j)] = out
        return out

    def _bracket_raw(self, i: int, j: int) -> dict[int, int]:
        ki, pi = self.labels[i]
        kj, pj = self.labels[j]
        L = self.lattice
        if ki == "h" and kj == "h":
            return {}
        if ki == "h":
            c = L.ip(L.simple_roots[pi], pj)
            return {j: c} if c else {}
        if kj == "h":
            c = -L.ip(L.simple_roots[pj], pi)
            return {i: c} if c else {}
        a, b = pi, pj
        s = tuple(x + y for x, y in zip(a, b))
        if all(v == 0 for v in s):
            sign = self.cocycle.eps(a, b)
            return {k: sign * c for k, c in enumerate(a) if c}
        if L.ip(a, b) == -1:
            return {self._root_index[s]: self.cocycle.eps(a, b)}
        return {}

    def bracket_vec_ints(self, x: dict[int, int], y: dict[int, int]) -> dict[int, int]:
        out: dict[int, int] = {}
        for i, ci in x.items():
            for j, cj in y.items():
                c = ci * cj
                for k, v in self.bracket_ints(i, j).items():
                    w = out.get(k, 0) + c * v
                    if w:
                        out[k] = w
                    else:
                        out.pop(k, None)
        return out

    def bracket(self, x, y):
        """Bracket of dense coefficient vectors over the algebra's ring."""
        if len(x) != self.dim or len(y) != self.dim:
            raise ValueError("element does not belong to this algebra")
        R = self.ring
        out = [R.zero()] * self.dim
        for i, ci in enumerate(x):
            if R.is_zero(ci):
                continue
            for j, cj in enumerate(y):
                if R.is_zero(cj):
                    continue
                c = R.mul(ci, cj)
                for k, v in self.bracket_ints(i, j).items():
                    out[k] = R.add(out[k], R.mul(c, R.from_int(v)))
        return out

    def ad_int(self, vec: dict[int, int]) -> np.ndarray:
        """Integer matrix of ad(vec) on columns (image of basis_j in column j)."""
        M = np.zeros((self.dim, self.dim), dtype=np.int64)
        for j in range(self.dim):
            img = self.bracket_vec_ints(vec, {j: 1})
            for k, v in img.items():
                M[k, j] = v
        return M

    def struct_tensor(self) -> list[list[dict[int, int]]]:
        return [[self.bracket_ints(i, j) for j in range(self.dim)] for i in range(self.dim)]

    # ------------------------------------------------------------ generators

    @lru_cache(maxsize=None)
    def generator_divided_powers(self, root: Vec) -> tuple:
        """Integer matrices (ad e_root)^k / k! until they vanish.

        Computed over Q; integrality is asserted (a failure here means the
        structure constants are wrong).
        """
        if root not in self._root_index:
            raise ValueError(f"{root} is not a root")
        A = self.ad_int({self._root_index[root]: 1})
        powers = [np.eye(self.dim, dtype=np.int64)]
        P = [[Fraction(int(v)) for v in row] for row in A]
        k = 1
        cur = P
        while any(any(v for v in row) for row in cur):
            mat = np.zeros((self.dim, self.dim), dtype=np.int64)
            for r in range(self.dim):
                for c in range(self.dim):
                    v = cur[r][c]
                    if v.denominator != 1:
                        raise ArithmeticError(
                            f"non-integral divided power (ad e)^{k}/{k}! at {root}"
                        )
                    mat[r, c] = int(v)
            powers.append(mat)
            k += 1
            nxt = [[Fraction(0)] * self.dim for _ in range(self.dim)]
            for r in range(self.dim):
                arow = A[r]
                nz = np.nonzero(arow)[0]
                for m in nz:
                    a = Fraction(int(arow[m]), k)
                    for c in range(self.dim):
                        if cur[m][c]:
                            nxt[r][c] += a * cur[m][c]
            cur = nxt
        return tuple(powers)

    def chevalley_generator(self, root: Vec, t):
        """Matrix of x_root(t) = exp(t ad e_root) over the ring."""
        R = self.ring
        powers = self.generator_divided_powers(root)
        out = [[R.zero()] * self.dim for _ in range(self.dim)]
        tk = R.one()
        for k, P in enumerate(powers):
            if k:
                tk = R.mul(tk, t)
            for r in range(self.dim):
                for c in np.nonzero(P[r])[0]:
                    out[r][int(c)] = R.add(out[r][int(c)], R.mul(tk, R.from_int(int(P[r][c]))))
        return out

    def generator_int(self, root: Vec, t: int = 1) -> np.ndarray:
        powers = self.generator_divided_powers(root)
        out = np.zeros((self.dim, self.dim), dtype=np.int64)
        for k, P in enumerate(powers):
            out += (t ** k) * P
        return out

    # --------------------------------------------------------- automorphisms

    def graph_action_int(self, aut: GraphAut) -> np.ndarray:
        """Signed permutation matrix of the lifted diagram symmetry."""
        if aut.lattice is not self.lattice:
            raise ValueError("automorphism belongs to a different lattice")
        cz = self.cocycle
        M = np.zeros((self.dim, self.dim), dtype=np.int64)
        for i in range(self.rank):
            M[aut.perm[i], i] = 1
        for r in self.lattice.roots:
            M[self._root_index[aut.apply(r)], self._root_index[r]] = cz.eta(r)
        return M

    def norm_int(self, aut: GraphAut) -> np.ndarray:
        G = self.graph_action_int(aut)
        out = np.eye(self.dim, dtype=np.int64)
        acc = np.eye(self.dim, dtype=np.int64)
        for _ in range(aut.order - 1):
            acc = acc @ G
            out = out + acc
        return out

    def preserves_bracket_int(self, M: np.ndarray, mod: int | None = None,
                              pairs=None) -> bool:
        """Check M[x,y] = [Mx, My] on basis pairs (all pairs by default)."""
        dim = self.dim
        idx = pairs if pairs is not None else [
            (i, j) for i in range(dim) for j in range(i + 1, dim)
        ]
        for i, j in idx:
            lhs: dict[int, int] = {}
            for k, v in self.bracket_ints(i, j).items():
                col = M[:, k]
                for m in np.nonzero(col)[0]:
                    w = lhs.get(int(m), 0) + v * int(col[m])
                    if w:
                        lhs[int(m)] = w
                    else:
                        lhs.pop(int(m), None)
            xi = {int(m): int(M[m, i]) for m in np.nonzero(M[:, i])[0]}
            yj = {int(m): int(M[m, j]) for m in np.nonzero(M[:, j])[0]}
            rhs = self.bracket_vec_ints(xi, yj)
            if mod is None:
                if lhs != rhs:
                    return False
            else:
                keys = set(lhs) | set(rhs)
                if any((lhs.get(k, 0) - rhs.get(k, 0)) % mod for k in keys):
                    return False
        return True


def build_chevalley(lattice: RootLattice | str, ring: Ring,
                    cocycle: CocycleTable | None = None) -> ChevalleyAlgebra:
    if isinstance(lattice, str):
        lattice = build_root_lattice(lattice)
    return ChevalleyAlgebra(lattice, ring, cocycle)


# --------------------------------------------------------------- field tools


def center_modp(alg: ChevalleyAlgebra, p: int) -> np.ndarray:
    """Basis (rows) of the center over F_p."""
    stacked = np.vstack([alg.ad_int({i: 1}) % p for i in range(alg.dim)])
    return kernel_modp(stacked, p)


def ideal_generated_by_modp(alg: ChevalleyAlgebra, gens: np.ndarray, p: int) -> np.ndarray:
    """Row basis of the ideal generated by the given row vectors over F_p."""
    span, pivots = rref_modp(np.atleast_2d(gens) % p, p)
    while True:
        new_rows = [span]
        for row in span:
            vec = {int(j): int(row[j]) for j in np.nonzero(row)[0]}
            for i in range(alg.dim):
                img = alg.bracket_vec_ints({i: 1}, vec)
                if img:
                    r = np.zeros(alg.dim, dtype=np.int64)
                    for k, v in img.items():
                        r[k] = v % p
                    new_rows.append(r.reshape(1, -1))
        stacked = np.vstack(new_rows) % p
        nspan, npivots = rref_modp(stacked, p)
        if len(npivots) == len(pivots):
            return span
        span, pivots = nspan, npivots


def is_ideal_modp(alg: ChevalleyAlgebra, rows: np.ndarray, p: int) -> bool:
    span, pivots = rref_modp(np.atleast_2d(rows) % p, p)
    for row in span:
        vec = {int(j): int(row[j]) for j in np.nonzero(row)[0]}
        for i in range(alg.dim):
            img = alg.bracket_vec_ints({i: 1}, vec)
            v = np.zeros(alg.dim, dtype=np.int64)
            for k, c in img.items():
                v[k] = c % p
            if not _in_span(v, span, pivots, p):
                return False
    return True


def _in_span(v: np.ndarray, rref_rows: np.ndarray, pivots, p: int) -> bool:
    v = v.copy() % p
    for row, piv in zip(rref_rows, pivots):
        c = int(v[piv])
        if c:
            v = (v - c * row) % p
    return not v.any()


def _solve_in_basis(basis_rows: np.ndarray, vec: np.ndarray, p: int):
    """Coordinates of vec in the span of basis_rows over F_p, or None."""
    k = basis_rows.shape[0]
    # Solve basis^T x = vec via rref of [basis^T | vec].
    aug = np.hstack([basis_rows.T % p, vec.reshape(-1, 1) % p])
    R, pivots = rref_modp(aug, p)
    x = np.zeros(k, dtype=np.int64)
    for row, piv in zip(R, pivots):
        if piv == k:
            return None
        x[piv] = row[k]
    return x


# ------------------------------------------------------ exceptional machinery

_ANCESTORS = {
    ("A2", 3): ("D4", 3),
    ("A1", 2): ("A2", 2),
    ("D4", 2): ("E6", 2),
    ("D3", 2): ("D4", 2),
    ("D5", 2): ("D6", 2),
    ("D6", 2): ("D7", 2),
    ("D7", 2): ("D8", 2),
}


def exceptional_ancestor(sub_type: str, p: int) -> tuple[RootLattice, GraphAut]:
    key = (sub_type.upper().replace("_", ""), p)
    if key not in _ANCESTORS:
        raise ValueError(f"({sub_type}, {p}) is not a supported exceptional pair")
    name, order = _ANCESTORS[key]
    lat = build_root_lattice(name)
    return lat, graph_automorphism(lat, order)


@dataclass
class ReducedAlgebra:
    """Fixed points mod norm ideal of the ancestor algebra over F_p."""

    pair: tuple[str, int]
    ancestor: ChevalleyAlgebra
    aut: GraphAut
    p: int
    fixed: np.ndarray          # rows: basis of C
    norm: np.ndarray           # rows: basis of N = im(nu) (inside C)
    quotient_reps: np.ndarray  # rows: representatives completing N to C
    covering: np.ndarray       # rows: basis of the type-X' subalgebra
    covering_kernel_dim: int = 0
    center_dim: int = 0

    @property
    def fixed_dim(self) -> int:
        return self.fixed.shape[0]

    @property
    def norm_dim(self) -> int:
        return self.norm.shape[0]

    @property
    def quotient_dim(self) -> int:
        return self.quotient_reps.shape[0]

    def project(self, vec: np.ndarray):
        """Quotient coordinates of a fixed vector, or None if not in C."""
        basis = np.vstack([self.norm, self.quotient_reps]) if self.norm_dim else self.quotient_reps
        x = _solve_in_basis(basis, vec, self.p)
        if x is None:
            return None
        return x[self.norm_dim:] % self.p

    def quotient_bracket(self, qi: int, qj: int) -> np.ndarray:
        u = {int(k): int(v) for k, v in enumerate(self.quotient_reps[qi]) if v}
        w = {int(k): int(v) for k, v in enumerate(self.quotient_reps[qj]) if v}
        img = self.ancestor.bracket_vec_ints(u, w)
        vec = np.zeros(self.ancestor.dim, dtype=np.int64)
        for k, v in img.items():
            vec[k] = v % self.p
        out = self.project(vec)
        assert out is not None, "quotient bracket left the fixed subalgebra"
        return out

    def quotient_table(self) -> list[list[np.ndarray]]:
        q = self.quotient_dim
        return [[self.quotient_bracket(i, j) for j in range(q)] for i in range(q)]


def reduced_algebra(sub_type: str, p: int) -> ReducedAlgebra:
    lat, aut = exceptional_ancestor(sub_type, p)
    assert aut.order == p
    cz = build_cocycle(lat, aut)
    alg = ChevalleyAlgebra(lat, PrimeField(p), cz)
    G = alg.graph_action_int(aut) % p
    fixed = rref_modp(kernel_modp((G - np.eye(alg.dim, dtype=np.int64)) % p, p), p)[0]
    nu = alg.norm_int(aut) % p
    norm = rref_modp(nu.T % p, p)[0]
    # N lies inside C and is an ideal of C; both are theorems, assert them.
    fr, fpiv = rref_modp(fixed, p)
    assert all(_in_span(row, fr, fpiv, p) for row in norm)
    reps = []
    acc = norm.copy() if norm.size else np.zeros((0, alg.dim), dtype=np.int64)
    rank = len(rref_modp(norm, p)[1]) if norm.size else 0
    for row in fixed:
        cand = np.vstack([acc, row.reshape(1, -1)])
        r2 = len(rref_modp(cand, p)[1])
        if r2 > rank:
            acc = cand
            rank = r2
            reps.append(row)
    quotient_reps = np.array(reps, dtype=np.int64) if reps else np.zeros((0, alg.dim), dtype=np.int64)

    # Covering subalgebra: span of fixed-root vectors and their coroots.
    cov_rows = []
    for r in aut.fixed_roots():
        v = np.zeros(alg.dim, dtype=np.int64)
        v[alg.index(("e", r))] = 1
        cov_rows.append(v)
        h = np.zeros(alg.dim, dtype=np.int64)
        for i, c in enumerate(r):
            h[i] = c % p
        cov_rows.append(h)
    covering = rref_modp(np.array(cov_rows, dtype=np.int64), p)[0]

    red = ReducedAlgebra(
        pair=(sub_type.upper(), p), ancestor=alg, aut=aut, p=p,
        fixed=fixed, norm=norm, quotient_reps=quotient_reps, covering=covering,
    )
    # Covering map image and kernel dimension.
    proj_rows = []
    for row in covering:
        q = red.project(row)
        assert q is not None, "covering subalgebra not contained in fixed points"
        proj_rows.append(q)
    img_rank = len(rref_modp(np.array(proj_rows, dtype=np.int64), p)[1]) if proj_rows else 0
    red.covering_kernel_dim = covering.shape[0] - img_rank
    assert img_rank == red.quotient_dim, "covering subalgebra does not cover the quotient"
    red.center_dim = center_modp(alg, p).shape[0]
    return red


@dataclass
class GeneratorReport:
    label: str
    descends: bool
    bracket_ok: bool
    is_identity: bool


@dataclass
class ExceptionalReport:
    pair: tuple[str, int]
    dims: dict
    generators: list[GeneratorReport] = field(default_factory=list)
    moves_root_lines: bool = False

    @property
    def all_pass(self) -> bool:
        return all(g.descends and g.bracket_ok for g in self.generators)


def exceptional_action_check(sub_type: str, p: int, t: int = 1) -> ExceptionalReport:
    """Verify the ancestor fixed group acts on the reduced algebra.

    Long-root generators x_b(t) for fixed roots b, and orbit products
    prod_j x_{g^j a}(t) for the root orbits, must normalize both the fixed
    subalgebra and the norm ideal and induce bracket automorphisms of the
    quotient.
    """
    red = reduced_algebra(sub_type, p)
    alg, aut = red.ancestor, red.aut
    gens: list[tuple[str, np.ndarray]] = []
    for b in aut.fixed_roots():
        gens.append((f"long{b}", alg.generator_int(b, t) % p))
    for orbit in aut.orbits_on_roots():
        for a in orbit:
            for bb in orbit:
                if a != bb and alg.lattice.ip(a, bb) != 0:
                    raise ValueError("orbit elements are not orthogonal; no plain product lift")
        M = np.eye(alg.dim, dtype=np.int64)
        for a in orbit:
            M = (M @ alg.generator_int(a, t)) % p
        gens.append((f"orbit{orbit[0]}", M))

    fr, fpiv = rref_modp(red.fixed, p)
    nr, npiv = (rref_modp(red.norm, p) if red.norm.size else (red.norm, []))
    q = red.quotient_dim
    table = red.quotient_table()
    reports = []
    moved = False
    cov_lines = []
    for row in red.covering:
        pr = red.project(row)
        if pr is not None and pr.any():
            cov_lines.append(pr % p)
    cov_r, cov_piv = rref_modp(np.array(cov_lines, dtype=np.int64), p)

    for label, M in gens:
        ok_fix = all(_in_span((M @ v) % p, fr, fpiv, p) for v in red.fixed)
        ok_norm = all(_in_span((M @ v) % p, nr, npiv, p) for v in red.norm) if red.norm.size else True
        descends = ok_fix and ok_norm
        bracket_ok = False
        if descends:
            Qm = np.zeros((q, q), dtype=np.int64)
            good = True
            for j in range(q):
                img = red.project((M @ red.quotient_reps[j]) % p)
                if img is None:
                    good = False
                    break
                Qm[:, j] = img
            if good:
                bracket_ok = True
                for i in range(q):
                    for j in range(q):
                        lhs = (Qm @ table[i][j]) % p
                        rhs = np.zeros(q, dtype=np.int64)
                        for a in range(q):
                            if Qm[a, i] == 0:
                                continue
                            for b in range(q):
                                if Qm[b, j]:
                                    rhs = (rhs + Qm[a, i] * Qm[b, j] * table[a][b]) % p
                        if ((lhs - rhs) % p).any():
                            bracket_ok = False
                if label.startswith("orbit") and bracket_ok:
                    for line in cov_lines:
                        img = (Qm @ line) % p
                        if not _is_multiple_of_line(img, cov_lines, p):
                            moved = True
                            break
        is_id = bool(((M - np.eye(alg.dim, dtype=np.int64)) % p == 0).all())
        reports.append(GeneratorReport(label, descends, bracket_ok, is_id))

    dims = {
        "fixed": red.fixed_dim,
        "norm_ideal": red.norm_dim,
        "quotient": red.quotient_dim,
        "center": red.center_dim,
    }
    return ExceptionalReport(red.pair, dims, reports, moved)


def _is_multiple_of_line(v: np.ndarray, lines, p: int) -> bool:
    for w in lines:
        # v parallel to w over F_p?
        nz = np.nonzero(w)[0]
        if nz.size == 0:
            continue
        c = (int(v[nz[0]]) * pow(int(w[nz[0]]), -1, p)) % p
        if ((v - c * w) % p == 0).all():
            return True
    return False
