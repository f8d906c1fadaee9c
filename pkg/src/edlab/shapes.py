"""Structural shape tags: cyclic, dihedral, quaternion, p-group, holomorph."""

from __future__ import annotations

from dataclasses import dataclass

from .grouptable import GroupTable, prime_factors, structural_invariants


@dataclass(frozen=True)
class ShapeTags:
    cyclic: bool
    dihedral: int | None  # group order 2n if dihedral
    odd_dihedral: bool
    generalized_quaternion: bool
    abelian: bool
    p_group: int | None
    holomorph_prime_power: int | None  # q with G = C_q : Aut(C_q), None otherwise

    def names(self) -> set[str]:
        out = set()
        if self.cyclic:
            out.add("cyclic")
        if self.dihedral:
            out.add(f"dihedral({self.dihedral})")
        if self.odd_dihedral:
            out.add("odd-dihedral")
        if self.generalized_quaternion:
            out.add("generalized-quaternion")
        if self.abelian:
            out.add("abelian")
        if self.p_group:
            out.add(f"p-group({self.p_group})")
        if self.holomorph_prime_power:
            out.add(f"full-holomorph-of-C_{self.holomorph_prime_power}")
        return out


def is_prime_power(n: int) -> int | None:
    """The prime p if n = p^k (k >= 1), else None."""
    if n < 2:
        return None
    pf = prime_factors(n)
    return pf[0] if len(pf) == 1 else None


def _is_dihedral(G: GroupTable) -> bool:
    """Match the presentation <r, s | r^n, s^2, (rs)^2> by element search."""
    n = G.order // 2
    if G.order % 2 or n < 2:
        return False
    orders = G.element_orders
    rs = [i for i in range(G.order) if orders[i] == n]
    if not rs:
        return False
    r = rs[0]
    rot = {G.power(r, k) for k in range(n)}
    for s in range(1, G.order):
        if orders[s] == 2 and s not in rot:
            if G.element_orders[G.mul(r, s)] == 2:
                if len(G.subgroup_closure([r, s])) == G.order:
                    return True
    return False


def _is_generalized_quaternion(G: GroupTable) -> bool:
    """Q_(2^k): a 2-group with a unique involution, non-cyclic."""
    p = is_prime_power(G.order)
    if p != 2 or G.order < 8:
        return False
    orders = G.element_orders
    if max(orders) == G.order:
        return False
    return sum(1 for o in orders if o == 2) == 1


def _holomorph_q(G: GroupTable) -> int | None:
    """q = p^n when G is C_q : Aut(C_q) with the natural faithful action."""
    from .isomorphism import is_isomorphic

    for q in (3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 32, 49):
        phi = sum(1 for a in range(1, q) if _gcd(a, q) == 1)
        if q * phi == G.order:
            if is_isomorphic(G, holomorph_of_cyclic(q)) is not None:
                return q
    return None


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def holomorph_of_cyclic(q: int) -> GroupTable:
    """C_q : (Z/q)^* realized on the q points of C_q (affine maps x -> ux + t)."""
    from . import perms
    from .grouptable import close_generators

    translate = tuple((x + 1) % q for x in range(q))
    gens = [translate]
    for u in range(2, q):
        if _gcd(u, q) == 1:
            gens.append(tuple((u * x) % q for x in range(q)))
    return close_generators(gens)


def recognize_shape(G: GroupTable) -> ShapeTags:
    inv = structural_invariants(G)
    cyclic = inv.exponent == G.order
    dihedral = _is_dihedral(G)
    n_half = G.order // 2 if dihedral else 0
    return ShapeTags(
        cyclic=cyclic,
        dihedral=G.order if dihedral else None,
        odd_dihedral=dihedral and n_half % 2 == 1 and n_half >= 3,
        generalized_quaternion=_is_generalized_quaternion(G),
        abelian=G.is_abelian,
        p_group=inv.p_group_prime,
        holomorph_prime_power=_holomorph_q(G),
    )
