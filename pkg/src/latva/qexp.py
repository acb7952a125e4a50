"""Graded dimensions as q-series coefficients: theta series over an eta-type
Euler product.  Everything is integer arithmetic on truncated series."""

from __future__ import annotations

from functools import lru_cache

from .rootdata import RootLattice


def theta_coefficients(lattice: RootLattice, nmax: int) -> list[int]:
    """Coefficients of Theta_L(q) = sum_{v in L} q^{<v,v>/2} up to q^nmax."""
    counts = [0] * (nmax + 1)
    for v in lattice.vectors_up_to_norm(2 * nmax):
        counts[lattice.norm(v) // 2] += 1
    return counts


def euler_inverse_coefficients(r: int, nmax: int) -> list[int]:
    """Coefficients of prod_{m>=1} (1 - q^m)^(-r): r-colored partitions."""
    out = [1] + [0] * nmax
    for m in range(1, nmax + 1):
        # multiply by (1 - q^m)^(-r) = sum_k C(k+r-1, r-1) q^{mk}
        nxt = out[:]
        for k in range(1, nmax // m + 1):
            c = 1
            for t in range(1, r):
                c = c * (k + t) // t
            # c = C(k+r-1, r-1)
            for n in range(m * k, nmax + 1):
                nxt[n] += c * out[n - m * k]
        out = nxt
    return out


def _series_mul(a: list[int], b: list[int], nmax: int) -> list[int]:
    out = [0] * (nmax + 1)
    for i, ai in enumerate(a[: nmax + 1]):
        if not ai:
            continue
        for j, bj in enumerate(b[: nmax + 1 - i]):
            if bj:
                out[i + j] += ai * bj
    return out


@lru_cache(maxsize=None)
def _graded_dims_cached(name: str, nmax: int) -> tuple[int, ...]:
    from .rootdata import build_root_lattice

    lattice = build_root_lattice(name)
    theta = theta_coefficients(lattice, nmax)
    euler = euler_inverse_coefficients(lattice.rank, nmax)
    return tuple(_series_mul(theta, euler, nmax))


def graded_dimension(lattice: RootLattice, n: int) -> int:
    """dim V_{L,n} = [q^n] Theta_L(q) / prod (1-q^m)^rank."""
    if n < 0:
        return 0
    if n > 12:
        raise ValueError("graded_dimension supported for n <= 12")
    return _graded_dims_cached(lattice.name, n)[n]


def graded_dimensions(lattice: RootLattice, upto: int) -> list[int]:
    return [graded_dimension(lattice, n) for n in range(upto + 1)]
