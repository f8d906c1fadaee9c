"""Subgroup inventory up to conjugacy.

Layered enumeration: start from cyclic subgroups, repeatedly extend each class
representative by one element and close. Every subgroup has a chief chain of
one-generator extensions, and conjugate representatives generate conjugate
extensions, so deduplicating by conjugacy at each layer loses nothing. No
bound on the number of generators is assumed (rank-4 and rank-5 groups of
order <= 63 exist, e.g. elementary abelian ones).
"""

from __future__ import annotations

from .grouptable import GroupTable, ScopeExceeded, Subgroup

INVENTORY_SCOPE = 63


def conjugate_set(G: GroupTable, members: frozenset[int], g: int) -> frozenset[int]:
    return frozenset(G.conj(m, g) for m in members)


def conjugacy_orbit(G: GroupTable, members: frozenset[int]) -> set[frozenset[int]]:
    """All conjugates of a subgroup (orbit under generator conjugation)."""
    orbit = {members}
    frontier = [members]
    while frontier:
        s = frontier.pop()
        for g in G.generators:
            t = conjugate_set(G, s, g)
            if t not in orbit:
                orbit.add(t)
                frontier.append(t)
    return orbit


def subgroups_up_to_conjugacy(
    G: GroupTable, scope: int | None = INVENTORY_SCOPE
) -> list[Subgroup]:
    """One representative per conjugacy class of subgroups, sorted by
    (order, sorted members). Representative = least member set in its orbit.

    `scope` guards against accidental use on large auxiliary groups; pass
    None to lift it.
    """
    if scope is not None and G.order > scope:
        raise ScopeExceeded(f"|G| = {G.order} exceeds inventory scope {scope}")
    triv = frozenset([0])
    seen: set[frozenset[int]] = {triv}
    reps: list[tuple[frozenset[int], list[int]]] = [(triv, [])]
    layer = [(triv, [])]
    while layer:
        next_layer = []
        for members, gens in layer:
            if len(members) == G.order:
                continue
            for x in range(1, G.order):
                if x in members:
                    continue
                ext = G.subgroup_closure(gens + [x])
                if ext in seen:
                    continue
                seen.update(conjugacy_orbit(G, ext))
                entry = (ext, gens + [x])
                reps.append(entry)
                next_layer.append(entry)
        layer = next_layer
    out = [Subgroup(G, m) for m, _ in reps]
    out.sort(key=lambda s: (s.order, sorted(s.members)))
    return out


def all_subgroups_brute(G: GroupTable) -> set[frozenset[int]]:
    """Independent oracle: every multiplicatively closed subset containing 0.

    Grown by single-element closure over the raw subset lattice, no conjugacy
    machinery. Exponential in principle; fine for |G| <= 24.
    """
    found = {frozenset([0])}
    frontier = [frozenset([0])]
    while frontier:
        s = frontier.pop()
        for x in range(1, G.order):
            if x in s:
                continue
            t = G.subgroup_closure(sorted(s) + [x])
            if t not in found:
                found.add(t)
                frontier.append(t)
    return found
