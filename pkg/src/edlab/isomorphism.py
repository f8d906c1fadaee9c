"""Isomorphism testing and monomorphism search by generator-image backtracking."""

from __future__ import annotations

from dataclasses import dataclass

from .grouptable import GroupTable, conjugacy_classes, structural_invariants


class BudgetExhausted(Exception):
    """Search hit its node limit; result is inconclusive, never a NotFound."""


@dataclass(frozen=True)
class EmbeddingWitness:
    """Images of a generating sequence of the source; machine-checkable."""

    source_gens: tuple[int, ...]
    images: tuple[int, ...]
    element_map: tuple[int, ...]  # source element index -> target element index

    def verify(self, G: GroupTable, H: GroupTable) -> bool:
        m = self.element_map
        if len(set(m)) != G.order:
            return False
        for a in range(G.order):
            for b in range(G.order):
                if m[G.mul(a, b)] != H.mul(m[a], m[b]):
                    return False
        return True


def generating_sequence(G: GroupTable) -> list[int]:
    """Greedy small generating sequence over the canonical element order."""
    got = frozenset([0])
    gens: list[int] = []
    # prefer elements of large order first so backtracking stays shallow
    by_order = sorted(range(1, G.order), key=lambda i: (-G.element_orders[i], i))
    for x in by_order:
        if x not in got:
            gens.append(x)
            got = G.subgroup_closure(gens)
            if len(got) == G.order:
                break
    assert len(got) == G.order or G.order == 1
    return gens


def _fingerprint_tables(H: GroupTable) -> tuple[list[int], list[int]]:
    """Element orders and centralizer orders (|C(x)| = |H| / |class of x|)."""
    cached = getattr(H, "_fingerprints", None)
    if cached is not None:
        return cached
    classes = conjugacy_classes(H)
    cents = [0] * H.order
    for c in classes:
        co = H.order // len(c)
        for x in c:
            cents[x] = co
    result = (H.element_orders, cents)
    H._fingerprints = result
    return result


def find_monomorphism(
    G: GroupTable, H: GroupTable, budget: int | None = 10_000_000
) -> EmbeddingWitness | None:
    """Injective homomorphism G -> H, or None when the exhaustive search ends.

    Candidate images are constrained by element order and centralizer-size
    fingerprints and tried in ascending element index. Raises BudgetExhausted
    when the node budget runs out (inconclusive).
    """
    if H.order % G.order != 0:
        return None
    if G.order == 1:
        return EmbeddingWitness((), (), (0,))
    gens = generating_sequence(G)
    g_orders, g_cents = _fingerprint_tables(G)
    h_orders, h_cents = _fingerprint_tables(H)
    # an embedding maps C_G(g) into C_H(im g), so |C_H(im)| >= |C_G(g)|
    candidates = [
        [
            j
            for j in range(H.order)
            if h_orders[j] == g_orders[g] and h_cents[j] >= g_cents[g]
        ]
        for g in gens
    ]

    nodes = 0

    def extend(level: int, partial_map: dict[int, int]) -> EmbeddingWitness | None:
        nonlocal nodes
        if level == len(gens):
            element_map = tuple(partial_map[i] for i in range(G.order))
            w = EmbeddingWitness(tuple(gens), tuple(element_map[g] for g in gens), element_map)
            assert w.verify(G, H)
            return w
        for img in candidates[level]:
            nodes += 1
            if budget is not None and nodes > budget:
                raise BudgetExhausted(f"monomorphism search exceeded {budget} nodes")
            new_map = _close_partial(G, H, partial_map, gens[level], img)
            if new_map is None:
                continue
            found = extend(level + 1, new_map)
            if found is not None:
                return found
        return None

    return extend(0, {0: 0})


def _close_partial(
    G: GroupTable, H: GroupTable, known: dict[int, int], gen: int, img: int
) -> dict[int, int] | None:
    """Extend a partial isomorphism of subgroups by one generator image.

    Multiplicatively closes {known, gen -> img}; returns None on any clash
    (non-homomorphic or non-injective).
    """
    fwd = dict(known)
    used = set(fwd.values())
    if gen in fwd:
        return fwd if fwd[gen] == img else None
    if img in used:
        return None
    fwd[gen] = img
    used.add(img)
    frontier = [gen]
    while frontier:
        x = frontier.pop()
        y = fwd[x]
        for a, b in list(fwd.items()):
            for (p, q), (r, s) in (((a, b), (x, y)), ((x, y), (a, b))):
                u = G.mul(p, r)
                v = H.mul(q, s)
                if u in fwd:
                    if fwd[u] != v:
                        return None
                elif v in used:
                    return None
                else:
                    fwd[u] = v
                    used.add(v)
                    frontier.append(u)
    return fwd


def is_isomorphic(G: GroupTable, H: GroupTable) -> EmbeddingWitness | None:
    """Isomorphism witness or None; invariants first, then backtracking."""
    if G.order != H.order:
        return None
    if invariant_key(G) != invariant_key(H):
        return None
    return find_monomorphism(G, H, budget=None)


def invariant_key(G: GroupTable) -> tuple:
    """Cheap isomorphism invariants used to prefilter identification."""
    cached = getattr(G, "_invariant_key", None)
    if cached is not None:
        return cached
    inv = structural_invariants(G)
    hist = tuple(sorted(inv.element_order_histogram.items()))
    key = (
        inv.order,
        inv.exponent,
        hist,
        inv.class_sizes,
        inv.abelian_invariants,
        inv.center_order,
        inv.derived_order,
        _normal_order_multiset(G),
    )
    G._invariant_key = key
    return key


def _normal_order_multiset(G: GroupTable) -> tuple[int, ...]:
    from .grouptable import normal_subgroups

    subs, _ = normal_subgroups(G)
    return tuple(sorted(s.order for s in subs))
