"""Exact irreducible character data via the modular (Dixon) method.

Characters are stored as values mod a Dixon prime plus exact eigenvalue
multiplicities; degrees and kernels are recovered exactly. No cyclotomic
arithmetic is ever needed: a prime p = 1 (mod exponent) with p > 2*ceil(sqrt n)
makes every lift unambiguous.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

import numpy as np

from .grouptable import (
    GroupTable,
    Subgroup,
    class_of_map,
    conjugacy_classes,
)


class SplittingFailure(Exception):
    pass


class LiftInconsistency(Exception):
    pass


@dataclass(frozen=True)
class DixonPrime:
    p: int
    primitive_root: int  # multiplicative order = root_of_unity_order mod p
    root_of_unity_order: int  # = exponent(G)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def dixon_prime(G: GroupTable) -> DixonPrime:
    """Smallest prime p = 1 (mod exponent) with p > 2*ceil(sqrt(|G|))."""
    e = G.exponent
    root_n = isqrt(G.order)
    if root_n * root_n < G.order:
        root_n += 1
    bound = 2 * root_n
    p = e + 1
    while p <= bound or not _is_prime(p):
        p += e
    root = _element_of_order(p, e)
    return DixonPrime(p, root, e)


def _element_of_order(p: int, e: int) -> int:
    """Smallest integer of multiplicative order exactly e mod p (e | p-1)."""
    assert (p - 1) % e == 0
    cofactor = (p - 1) // e
    for g in range(2, p):
        x = pow(g, cofactor, p)
        if x == 1:
            continue
        ok = True
        for q in _prime_divisors(e):
            if pow(x, e // q, p) == 1:
                ok = False
                break
        if ok:
            return x
    assert e == 1
    return 1


def _prime_divisors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _element_arrays(G: GroupTable):
    cached = getattr(G, "_elem_arrays", None)
    if cached is not None:
        return cached
    arr = np.array(G.elements, dtype=np.int32)
    lookup = {p: i for i, p in enumerate(G.elements)}
    G._elem_arrays = (arr, lookup)
    return G._elem_arrays


def class_algebra_constants(G: GroupTable) -> np.ndarray:
    """a[i][j][k] = #{(x, y) in C_i x C_j : x*y = rep_k}."""
    classes = conjugacy_classes(G)
    cls_of = class_of_map(classes)
    reps = [c[0] for c in classes]
    r = len(classes)
    arr, lookup = _element_arrays(G)
    inv = G.inverses
    a = np.zeros((r, r, r), dtype=np.int64)
    for k, gk in enumerate(reps):
        gk_row = arr[gk]
        for i, ci in enumerate(classes):
            # y = x^-1 * gk  =>  x*y = gk; count class of y
            inv_rows = arr[[inv[x] for x in ci]]
            ys = inv_rows[:, gk_row]
            for row in ys:
                j = cls_of[lookup[tuple(int(v) for v in row)]]
                a[i][j][k] += 1
    return a


# ---------------------------------------------------------------------------
# linear algebra mod p


def _rref(mat: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Row-reduced echelon form mod p; returns (reduced rows, pivot columns)."""
    m = mat % p
    m = m.astype(np.int64)
    rows, cols = m.shape
    pivots = []
    rank = 0
    for c in range(cols):
        pivot = None
        for r_ in range(rank, rows):
            if m[r_, c] % p:
                pivot = r_
                break
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        inv = pow(int(m[rank, c]), p - 2, p)
        m[rank] = m[rank] * inv % p
        for r_ in range(rows):
            if r_ != rank and m[r_, c]:
                m[r_] = (m[r_] - m[r_, c] * m[rank]) % p
        pivots.append(c)
        rank += 1
        if rank == rows:
            break
    return m[:rank], pivots


def _kernel_basis(mat: np.ndarray, p: int) -> np.ndarray:
    """Basis (rows) of the kernel of mat mod p, in canonical rref form."""
    n = mat.shape[1]
    red, pivots = _rref(mat, p)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(n, dtype=np.int64)
        v[f] = 1
        for r_, c in enumerate(pivots):
            v[c] = (-red[r_, f]) % p
        basis.append(v)
    if not basis:
        return np.zeros((0, n), dtype=np.int64)
    return np.array(basis, dtype=np.int64)


def _minpoly_of_vector(A: np.ndarray, v: np.ndarray, p: int) -> np.ndarray:
    """Monic minimal polynomial of A at v (coefficients low-to-high, mod p)."""
    d = A.shape[0]
    krylov = [v % p]
    while True:
        nxt = (A @ krylov[-1]) % p
        stack = np.array(krylov + [nxt], dtype=np.int64)
        red, pivots = _rref(stack.copy(), p)
        if len(pivots) < len(stack):
            # last vector is dependent: solve for coefficients
            k = len(krylov)
            M = np.array(krylov, dtype=np.int64).T % p
            coeffs = _solve(M, nxt, p)
            poly = np.zeros(k + 1, dtype=np.int64)
            poly[:k] = (-coeffs) % p
            poly[k] = 1
            return poly
        krylov.append(nxt)
        assert len(krylov) <= d + 1


def _solve(M: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Solve M x = b mod p (M need not be square; system must be consistent)."""
    rows, cols = M.shape
    aug = np.concatenate([M % p, (b % p).reshape(-1, 1)], axis=1)
    red, pivots = _rref(aug, p)
    x = np.zeros(cols, dtype=np.int64)
    for r_, c in enumerate(pivots):
        if c == cols:
            raise ValueError("inconsistent system")
        x[c] = red[r_, cols]
    return x


def _poly_roots(poly: np.ndarray, p: int) -> list[int]:
    xs = np.arange(p, dtype=np.int64)
    vals = np.zeros(p, dtype=np.int64)
    for c in poly[::-1]:
        vals = (vals * xs + int(c)) % p
    return [int(x) for x in xs[vals == 0]]


def irreducible_characters_mod_p(
    G: GroupTable, dp: DixonPrime, constants: np.ndarray | None = None
) -> np.ndarray:
    """All r irreducible characters as mod-p value rows, canonically sorted.

    Simultaneous eigenvectors of the class-algebra matrices give the vectors
    u_j = |C_j| chi(g_j) / chi(1) mod p; degrees come from the orthogonality
    normalization and are exact because deg < sqrt|G| < p/2.
    """
    p = dp.p
    classes = conjugacy_classes(G)
    r = len(classes)
    a = class_algebra_constants(G) if constants is None else constants
    # (A_i)[j][k] = a[i][j][k]; common eigenvectors are the omega-vectors
    spaces = [np.eye(r, dtype=np.int64)]
    for i in range(1, r):
        A = a[i] % p
        new_spaces = []
        for W in spaces:
            if W.shape[0] == 1:
                new_spaces.append(W)
                continue
            AW = _restrict(A, W, p)
            d = AW.shape[0]
            eigvals: list[int] = []
            covered = 0
            for probe in range(d):
                v = np.zeros(d, dtype=np.int64)
                v[probe] = 1
                poly = _minpoly_of_vector(AW, v, p)
                for lam in _poly_roots(poly, p):
                    if lam not in eigvals:
                        eigvals.append(lam)
                covered = sum(
                    _kernel_basis(AW - lam * np.eye(d, dtype=np.int64), p).shape[0]
                    for lam in eigvals
                )
                if covered == d:
                    break
            if covered != d:
                raise SplittingFailure(
                    f"class matrix {i} not diagonalizable mod {p}"
                )
            for lam in sorted(eigvals):
                K = _kernel_basis(AW - lam * np.eye(d, dtype=np.int64), p)
                new_spaces.append(K @ W % p)
        spaces = new_spaces
        if all(W.shape[0] == 1 for W in spaces):
            break
    if not all(W.shape[0] == 1 for W in spaces):
        raise SplittingFailure("common eigenspaces are not all one-dimensional")

    cls_sizes = [len(c) for c in classes]
    cls_of = class_of_map(classes)
    reps = [c[0] for c in classes]
    jinv = [cls_of[G.inv(g)] for g in reps]
    n = G.order

    rows = []
    for W in spaces:
        u = W[0] % p
        if u[0] == 0:
            raise SplittingFailure("eigenvector vanishes on the identity class")
        u = u * pow(int(u[0]), p - 2, p) % p
        s = 0
        for j in range(r):
            s = (s + int(u[j]) * int(u[jinv[j]]) * pow(cls_sizes[j], p - 2, p)) % p
        d_sq = n % p * pow(s, p - 2, p) % p
        degree = None
        for t in range(1, isqrt(n) + 1):
            if t * t % p == d_sq:
                degree = t
                break
        if degree is None:
            raise SplittingFailure("degree is not a small square root")
        chi = [
            degree * int(u[j]) % p * pow(cls_sizes[j], p - 2, p) % p for j in range(r)
        ]
        rows.append((degree, chi))

    assert len(rows) == r
    assert sum(d * d for d, _ in rows) == n, "sum of squared degrees must be |G|"
    rows.sort(key=lambda t: (t[0], t[1]))
    return np.array([chi for _, chi in rows], dtype=np.int64)


def _restrict(A: np.ndarray, W: np.ndarray, p: int) -> np.ndarray:
    """Matrix of A on the invariant row-space W, acting on W-coordinates.

    Row i of W @ A.T is A applied to basis vector w_i; expressing those in
    the W basis gives rows of coefficients, so the matrix acting on coordinate
    columns is their transpose.
    """
    imgs = W @ A.T % p
    coeffs = []
    WT = W.T % p
    for img in imgs:
        coeffs.append(_solve(WT, img, p))
    return np.array(coeffs, dtype=np.int64).T % p


def lift_eigenvalue_multiplicities(
    G: GroupTable, dp: DixonPrime, modp_values: np.ndarray
) -> list[list[tuple[int, ...]]]:
    """Exact eigenvalue multiplicities mu for every (character, class).

    mu_k = (1/m) sum_t chi(g^t) w^(-kt) mod p is exact since 0 <= mu_k <= deg < p.
    """
    p = dp.p
    classes = conjugacy_classes(G)
    cls_of = class_of_map(classes)
    reps = [c[0] for c in classes]
    orders = G.element_orders
    degrees = [int(modp_values[i][0]) for i in range(len(classes))]
    out: list[list[tuple[int, ...]]] = []
    power_class = []
    for g in reps:
        m = orders[g]
        power_class.append([cls_of[G.power(g, t)] for t in range(m)])
    n_chars = modp_values.shape[0]
    per_class: list[np.ndarray] = []
    for j, g in enumerate(reps):
        m = orders[g]
        w = pow(dp.primitive_root, dp.root_of_unity_order // m, p)
        wpow = [1] * m
        for t in range(1, m):
            wpow[t] = wpow[t - 1] * w % p
        # W[k][t] = w^(-kt); mu-rows = chi-at-powers @ W.T / m
        W = np.array(
            [[wpow[(-k * t) % m] for t in range(m)] for k in range(m)],
            dtype=np.int64,
        )
        X = modp_values[:, power_class[j]]  # (n_chars, m)
        inv_m = pow(m, p - 2, p)
        mus = (X @ W.T) % p * inv_m % p
        per_class.append(mus)
    for i in range(n_chars):
        d = degrees[i]
        row = []
        for j in range(len(reps)):
            mus = [int(v) for v in per_class[j][i]]
            if any(mu > d for mu in mus):
                raise LiftInconsistency(
                    f"multiplicity exceeds degree {d} (char {i}, class {j})"
                )
            if sum(mus) != d:
                raise LiftInconsistency(
                    f"multiplicities sum to {sum(mus)} != degree {d}"
                )
            row.append(tuple(mus))
        out.append(row)
    return out


def character_kernels(
    G: GroupTable, classes: list[list[int]], degrees: list[int],
    eigen: list[list[tuple[int, ...]]],
) -> list[Subgroup]:
    """ker chi = union of classes whose eigenvalues are all 1 (mu_0 = deg)."""
    kernels = []
    for i, d in enumerate(degrees):
        members: set[int] = set()
        for j, c in enumerate(classes):
            if eigen[i][j][0] == d:
                members.update(c)
        sub = Subgroup(G, frozenset(members))
        assert sub.is_normal(), "character kernel must be normal"
        kernels.append(sub)
    return kernels


@dataclass
class CharacterTable:
    group: GroupTable
    dp: DixonPrime
    classes: list[list[int]]
    modp_values: np.ndarray  # (r, r) chi_i(g_j) mod p
    degrees: list[int]
    eigen: list[list[tuple[int, ...]]]
    kernels: list[Subgroup]

    @property
    def n_irreducibles(self) -> int:
        return len(self.degrees)

    def check_orthogonality(self) -> None:
        """Row and column orthogonality mod p (raises on failure)."""
        p = self.dp.p
        r = len(self.classes)
        sizes = [len(c) for c in self.classes]
        cls_of = class_of_map(self.classes)
        reps = [c[0] for c in self.classes]
        jinv = [cls_of[self.group.inv(g)] for g in reps]
        n = self.group.order % p
        V = self.modp_values
        for i1 in range(r):
            for i2 in range(r):
                s = 0
                for j in range(r):
                    s = (s + sizes[j] * int(V[i1][j]) * int(V[i2][jinv[j]])) % p
                want = n if i1 == i2 else 0
                assert s == want, f"row orthogonality fails at ({i1},{i2})"
        for j1 in range(r):
            for j2 in range(r):
                s = 0
                for i in range(r):
                    s = (s + int(V[i][j1]) * int(V[i][jinv[j2]])) % p
                want = (self.group.order // sizes[j1]) % p if j1 == j2 else 0
                assert s == want, f"column orthogonality fails at ({j1},{j2})"

    def dump(self) -> str:
        """Stable text dump: degrees and kernel orders, one character per line."""
        lines = [f"classes {len(self.classes)}  prime {self.dp.p}"]
        for i, d in enumerate(self.degrees):
            lines.append(f"chi{i}  degree {d}  kernel_order {self.kernels[i].order}")
        return "\n".join(lines) + "\n"


def character_table(G: GroupTable) -> CharacterTable:
    dp = dixon_prime(G)
    classes = conjugacy_classes(G)
    values = irreducible_characters_mod_p(G, dp)
    degrees = [int(values[i][0]) for i in range(len(classes))]
    eigen = lift_eigenvalue_multiplicities(G, dp, values)
    kernels = character_kernels(G, classes, degrees, eigen)
    return CharacterTable(G, dp, classes, values, degrees, eigen, kernels)
