"""Materialized finite permutation groups and their structural queries.

A GroupTable stores every element (deterministic breadth-first order from the
identity, generators in the order given) so that all later computations are
exact and reproducible byte-for-byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import gcd

import numpy as np

from . import perms
from .perms import Perm

CLOSURE_BUDGET = 2500
DENSE_TABLE_LIMIT = 600


class ClosureBudgetExceeded(Exception):
    """Generated group is larger than the engine's scope bound."""


class NotADivisor(Exception):
    pass


class NotNormal(Exception):
    pass


class ScopeExceeded(Exception):
    pass


class GroupTable:
    """A finite group, fully enumerated, with a multiplication oracle on indices."""

    def __init__(self, degree: int, elements: list[Perm], generators: list[int]):
        self.degree = degree
        self.elements = elements
        self.index = {p: i for i, p in enumerate(elements)}
        self.generators = generators
        self.order = len(elements)
        assert elements[0] == perms.identity(degree), "identity must come first"
        assert len(self.index) == self.order, "duplicate elements"
        self._mul_cache: dict[tuple[int, int], int] = {}
        self._table: np.ndarray | None = None
        if self.order <= DENSE_TABLE_LIMIT:
            self._build_dense_table()

    def _build_dense_table(self) -> None:
        n = self.order
        arr = np.array(self.elements, dtype=np.int32)
        table = np.empty((n, n), dtype=np.int32)
        # row i = p_i composed with each p_j: (p_i * p_j)(x) = p_i[p_j[x]]
        lookup = {p: i for i, p in enumerate(self.elements)}
        for i in range(n):
            prods = arr[i][arr]  # shape (n, degree): arr[i][arr[j,x]]
            for j in range(n):
                table[i, j] = lookup[tuple(prods[j])]
        self._table = table

    def mul(self, i: int, j: int) -> int:
        if self._table is not None:
            return int(self._table[i, j])
        key = (i, j)
        k = self._mul_cache.get(key)
        if k is None:
            k = self.index[perms.compose(self.elements[i], self.elements[j])]
            self._mul_cache[key] = k
        return k

    @cached_property
    def inverses(self) -> list[int]:
        return [self.index[perms.inverse(p)] for p in self.elements]

    def inv(self, i: int) -> int:
        return self.inverses[i]

    def conj(self, i: int, j: int) -> int:
        """j * i * j^-1."""
        return self.mul(self.mul(j, i), self.inv(j))

    def power(self, i: int, k: int) -> int:
        return self.index[perms.perm_power(self.elements[i], k)]

    @cached_property
    def element_orders(self) -> list[int]:
        return [perms.perm_order(p) for p in self.elements]

    @cached_property
    def exponent(self) -> int:
        e = 1
        for o in self.element_orders:
            e = e * o // gcd(e, o)
        return e

    @cached_property
    def is_abelian(self) -> bool:
        gens = self.generators
        return all(
            self.mul(a, b) == self.mul(b, a) for a in gens for b in gens
        )

    def subgroup_closure(self, seed: list[int]) -> frozenset[int]:
        """Indices of the subgroup generated by the given element indices."""
        members = {0}
        frontier = [0]
        gens = [g for g in seed if g != 0]
        for g in gens:
            if g not in members:
                members.add(g)
                frontier.append(g)
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = self.mul(x, g)
                if y not in members:
                    members.add(y)
                    frontier.append(y)
        return frozenset(members)

    def __repr__(self) -> str:
        return f"GroupTable(order={self.order}, degree={self.degree})"


def close_generators(gens: list[Perm], budget: int = CLOSURE_BUDGET) -> GroupTable:
    """Breadth-first closure from the identity; element order is deterministic."""
    assert gens, "need at least one generator (use the identity for the trivial group)"
    degree = len(gens[0])
    assert all(len(g) == degree for g in gens), "generators must share one degree"
    assert all(perms.is_perm(g) for g in gens), "generators must be bijections"
    ident = perms.identity(degree)
    elements = [ident]
    seen = {ident}
    queue = [ident]
    while queue:
        nxt = []
        for p in queue:
            for g in gens:
                q = perms.compose(p, g)
                if q not in seen:
                    seen.add(q)
                    elements.append(q)
                    nxt.append(q)
                    if len(elements) > budget:
                        raise ClosureBudgetExceeded(
                            f"closure exceeds {budget} elements"
                        )
        queue = nxt
    table = GroupTable(degree, elements, [elements.index(g) for g in gens])
    return table


@dataclass(frozen=True)
class Subgroup:
    """A subgroup given by the set of parent element indices."""

    parent: GroupTable
    members: frozenset[int]

    def __post_init__(self):
        assert 0 in self.members
        assert self.parent.order % len(self.members) == 0, "Lagrange violated"

    @property
    def order(self) -> int:
        return len(self.members)

    def contains(self, i: int) -> bool:
        return i in self.members

    def sorted_members(self) -> list[int]:
        return sorted(self.members)

    def generators(self) -> list[int]:
        """A small deterministic generating set (greedy over sorted members)."""
        got: frozenset[int] = frozenset([0])
        gens: list[int] = []
        for x in self.sorted_members():
            if x not in got:
                gens.append(x)
                got = self.parent.subgroup_closure(gens)
                if len(got) == self.order:
                    break
        return gens

    def as_group(self) -> GroupTable:
        """Rebuild the subgroup as a standalone GroupTable (faithful, canonical)."""
        gens = self.generators()
        if not gens:
            return close_generators([perms.identity(1)])
        return close_generators([self.parent.elements[g] for g in gens])

    def is_normal(self) -> bool:
        G = self.parent
        return all(
            G.conj(m, g) in self.members
            for g in G.generators
            for m in self.members
        )


def trivial_subgroup(G: GroupTable) -> Subgroup:
    return Subgroup(G, frozenset([0]))


def full_subgroup(G: GroupTable) -> Subgroup:
    return Subgroup(G, frozenset(range(G.order)))


def conjugacy_classes(G: GroupTable) -> list[list[int]]:
    """Partition into conjugacy classes.

    Identity class first, then sorted by (representative element order, size),
    ties broken by the smallest element index in the class.
    """
    seen = [False] * G.order
    classes = []
    for i in range(G.order):
        if seen[i]:
            continue
        orbit = {i}
        frontier = [i]
        seen[i] = True
        while frontier:
            x = frontier.pop()
            for g in G.generators:
                y = G.conj(x, g)
                if not seen[y]:
                    seen[y] = True
                    orbit.add(y)
                    frontier.append(y)
        classes.append(sorted(orbit))
    orders = G.element_orders
    head = [c for c in classes if 0 in c]
    rest = [c for c in classes if 0 not in c]
    rest.sort(key=lambda c: (orders[c[0]], len(c), c[0]))
    return head + rest


def class_of_map(classes: list[list[int]]) -> list[int]:
    """element index -> class index."""
    total = sum(len(c) for c in classes)
    out = [0] * total
    for ci, c in enumerate(classes):
        for x in c:
            out[x] = ci
    return out


def center(G: GroupTable) -> Subgroup:
    members = frozenset(
        i
        for i in range(G.order)
        if all(G.mul(i, g) == G.mul(g, i) for g in G.generators)
    )
    return Subgroup(G, members)


def centralizer_order(G: GroupTable, i: int) -> int:
    return sum(1 for j in range(G.order) if G.mul(i, j) == G.mul(j, i))


def derived_subgroup(G: GroupTable) -> Subgroup:
    """Normal closure of the commutators of generator pairs."""
    comms = set()
    for a in G.generators:
        for b in G.generators:
            comms.add(G.mul(G.mul(a, b), G.mul(G.inv(a), G.inv(b))))
    members = G.subgroup_closure(sorted(comms))
    while True:
        new = {
            G.conj(m, g)
            for m in members
            for g in G.generators
            if G.conj(m, g) not in members
        }
        if not new:
            break
        members = G.subgroup_closure(sorted(members | new))
    return Subgroup(G, members)


def sylow_subgroup(G: GroupTable, p: int) -> Subgroup:
    if G.order % p != 0:
        raise NotADivisor(f"{p} does not divide {G.order}")
    target = 1
    n = G.order
    while n % p == 0:
        target *= p
        n //= p
    members = frozenset([0])
    gens: list[int] = []
    orders = G.element_orders
    while len(members) < target:
        extended = False
        for x in range(1, G.order):
            o = orders[x]
            if o == 1 or x in members:
                continue
            while o % p == 0:
                o //= p
            if o != 1:
                continue
            trial = G.subgroup_closure(gens + [x])
            size = len(trial)
            q = size
            while q % p == 0:
                q //= p
            if q == 1 and size > len(members):
                gens.append(x)
                members = trial
                extended = True
                break
        assert extended, "greedy Sylow extension stalled (bug)"
    return Subgroup(G, members)


def normal_subgroups(G: GroupTable) -> tuple[list[Subgroup], list[bool]]:
    """All normal subgroups (unions of conjugacy classes), with minimal flags.

    Enumeration: normal closures of single classes, then closure under joins.
    Returned sorted by (order, sorted member tuple); flags mark the minimal
    nontrivial ones.
    """
    classes = conjugacy_classes(G)
    closures = []
    for c in classes[1:]:
        members = G.subgroup_closure(c)
        # closure of a full class is conjugation-stable, hence normal
        closures.append(members)
    found = {frozenset([0])}
    frontier = [frozenset([0])]
    while frontier:
        base = frontier.pop()
        for cl in closures:
            if cl <= base:
                continue
            joined = G.subgroup_closure(sorted(base | cl))
            fj = frozenset(joined)
            if fj not in found:
                found.add(fj)
                frontier.append(fj)
    subs = [Subgroup(G, m) for m in sorted(found, key=lambda m: (len(m), sorted(m)))]
    for s in subs:
        assert s.is_normal()
    minimal = []
    for s in subs:
        is_min = s.order > 1 and not any(
            1 < t.order < s.order and t.members < s.members for t in subs
        )
        minimal.append(is_min)
    return subs, minimal


def minimal_normal_subgroups(G: GroupTable) -> list[Subgroup]:
    subs, flags = normal_subgroups(G)
    return [s for s, f in zip(subs, flags) if f]


def quotient_group(G: GroupTable, N: Subgroup) -> tuple[GroupTable, list[int]]:
    """Quotient G/N as permutations of the left cosets, plus the projection map.

    Cosets are ordered by their smallest element index; the quotient group is
    rebuilt by closure from the projected generators so its element order is
    canonical. Projection maps each element index of G to a quotient index.
    """
    if not N.is_normal():
        raise NotNormal("subgroup is not normal")
    coset_of = [-1] * G.order
    cosets: list[list[int]] = []
    for i in range(G.order):
        if coset_of[i] >= 0:
            continue
        cs = sorted(G.mul(i, m) for m in N.members)
        ci = len(cosets)
        for x in cs:
            coset_of[x] = ci
        cosets.append(cs)
    ncs = len(cosets)

    def action(gi: int) -> Perm:
        return tuple(coset_of[G.mul(gi, cosets[c][0])] for c in range(ncs))

    gen_perms = [action(g) for g in G.generators] or [perms.identity(ncs)]
    Q = close_generators(gen_perms)
    assert Q.order == G.order // N.order
    projection = [Q.index[action(i)] for i in range(G.order)]
    assert projection[0] == 0
    return Q, projection


@dataclass(frozen=True)
class StructuralInvariants:
    order: int
    exponent: int
    element_order_histogram: dict[int, int]
    class_sizes: tuple[int, ...]
    abelian_invariants: tuple[int, ...]  # prime powers, empty if non-abelian
    center_order: int
    derived_order: int
    p_group_prime: int | None

    @property
    def rank(self) -> int:
        """Minimal generator count of an abelian group (max p-factor count)."""
        assert self.abelian_invariants or self.order == 1
        counts: dict[int, int] = {}
        for q in self.abelian_invariants:
            p = smallest_prime_factor(q)
            counts[p] = counts.get(p, 0) + 1
        return max(counts.values(), default=0)


def smallest_prime_factor(n: int) -> int:
    assert n > 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            return d
        d += 1
    return n


def prime_factors(n: int) -> list[int]:
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


def abelian_invariants(G: GroupTable) -> tuple[int, ...]:
    """Primary decomposition of an abelian group as a sorted tuple of prime powers.

    Uses order-counting: in the p-part, #{x : x^(p^k) = 1} = p^(sum min(ei, k))
    determines the multiset of exponents ei exactly.
    """
    assert G.is_abelian
    if G.order == 1:
        return ()
    invs: list[int] = []
    orders = G.element_orders
    for p in prime_factors(G.order):
        pe = 1
        n = G.order
        while n % p == 0:
            pe *= p
            n //= p
        # count elements of p-power order at most p^k
        max_e = 0
        q = pe
        while q > 1:
            q //= p
            max_e += 1
        counts = []
        for k in range(max_e + 1):
            pk = p**k
            counts.append(sum(1 for o in orders if pk % o == 0))
        # counts[k] = p^(sum_i min(ei,k)); recover exponent multiset
        exps = []
        prev = 0
        sums = []
        for k in range(max_e + 1):
            s = 0
            c = counts[k]
            while c > 1:
                c //= p
                s += 1
            sums.append(s)
        for k in range(1, max_e + 1):
            # number of factors with ei >= k equals sums[k]-sums[k-1]
            exps.append(sums[k] - sums[k - 1])
        for k in range(max_e, 0, -1):
            n_ge_k = exps[k - 1]
            n_ge_next = exps[k] if k < max_e else 0
            for _ in range(n_ge_k - n_ge_next):
                invs.append(p**k)
    return tuple(sorted(invs))


def structural_invariants(G: GroupTable) -> StructuralInvariants:
    hist: dict[int, int] = {}
    for o in G.element_orders:
        hist[o] = hist.get(o, 0) + 1
    classes = conjugacy_classes(G)
    pf = prime_factors(G.order) if G.order > 1 else []
    return StructuralInvariants(
        order=G.order,
        exponent=G.exponent,
        element_order_histogram=hist,
        class_sizes=tuple(sorted(len(c) for c in classes)),
        abelian_invariants=abelian_invariants(G) if G.is_abelian else (),
        center_order=center(G).order,
        derived_order=derived_subgroup(G).order,
        p_group_prime=pf[0] if len(pf) == 1 else None,
    )
