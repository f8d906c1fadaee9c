"""The essential-dimension-2 membership and exclusion checker.

Duncan's classification: a finite group of essential dimension 2 embeds in
GL2(C), S5, PSL2(F7), or one of four torus semidirect products T : G_f with a
coprimality condition on the torus intersection. Membership in a torus family
is certified by an explicit embedding into a finite approximation
(Z/m)^2 : G_f; exclusion is certified only through necessary conditions
(normal abelian subgroup enumeration), never through search exhaustion on the
infinite family.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from . import perms
from .grouptable import (
    GroupTable,
    Subgroup,
    abelian_invariants,
    close_generators,
    normal_subgroups,
    quotient_group,
    structural_invariants,
)
from .isomorphism import BudgetExhausted, EmbeddingWitness, find_monomorphism


class ForbiddenModulus(Exception):
    pass


@dataclass(frozen=True)
class DuncanFamily:
    case: str  # "ii".."v"
    family_id: int  # 1..4, the index of the acting matrix group
    gens: tuple[tuple[tuple[int, int], tuple[int, int]], ...]
    actor_name: str
    actor_order: int
    forbidden_primes: tuple[int, ...]


FAMILIES: tuple[DuncanFamily, ...] = (
    DuncanFamily(
        "ii", 1, (((1, -1), (1, 0)), ((0, 1), (1, 0))), "D12", 12, (2, 3)
    ),
    DuncanFamily(
        "iii", 2, (((-1, 0), (0, 1)), ((0, 1), (1, 0))), "D8", 8, (2,)
    ),
    DuncanFamily(
        "iv", 3, (((0, -1), (1, -1)), ((0, -1), (-1, 0))), "S3", 6, (3,)
    ),
    DuncanFamily(
        "v", 4, (((0, -1), (1, -1)), ((0, 1), (1, 0))), "S3", 6, (3,)
    ),
)


def family_by_id(family_id: int) -> DuncanFamily:
    for f in FAMILIES:
        if f.family_id == family_id:
            return f
    raise ValueError(f"no torus family {family_id}")


_ACTOR_MODULUS = 5  # all actor matrices stay distinct mod 5, so this block is faithful


def _row_action_perm(M, m: int, offset: int, degree: int, images: list[int]) -> None:
    """Fill images with the right-multiplication action v -> v M on (Z/m)^2."""
    for a in range(m):
        for b in range(m):
            na = (a * M[0][0] + b * M[1][0]) % m
            nb = (a * M[0][1] + b * M[1][1]) % m
            images[offset + a * m + b] = offset + na * m + nb


def torus_family_generators(family_id: int, m: int) -> tuple[list[perms.Perm], int]:
    """Generators of (Z/m)^2 : G_f plus the expected order.

    Torus points first (m^2 of them), then a 25-point block where the actor
    matrices act mod 5: that block keeps the realization faithful even when
    the torus action mod m is not (m = 1, 2).
    """
    fam = family_by_id(family_id)
    t_pts = m * m
    a_pts = _ACTOR_MODULUS * _ACTOR_MODULUS
    degree = t_pts + a_pts
    gens: list[perms.Perm] = []
    for coord in (0, 1):
        images = list(range(degree))
        for a in range(m):
            for b in range(m):
                na = (a + 1) % m if coord == 0 else a
                nb = (b + 1) % m if coord == 1 else b
                images[a * m + b] = na * m + nb
        gens.append(tuple(images))
    for M in fam.gens:
        images = list(range(degree))
        _row_action_perm(M, m, 0, degree, images)
        _row_action_perm(M, _ACTOR_MODULUS, t_pts, degree, images)
        gens.append(tuple(images))
    return gens, m * m * fam.actor_order


_overgroup_cache: dict[tuple[int, int], GroupTable] = {}


def torus_family_overgroup(family_id: int, m: int) -> GroupTable:
    fam = family_by_id(family_id)
    if any(m % p == 0 for p in fam.forbidden_primes):
        raise ForbiddenModulus(
            f"modulus {m} shares a prime with forbidden set {fam.forbidden_primes}"
        )
    key = (family_id, m)
    if key not in _overgroup_cache:
        gens, order = torus_family_generators(family_id, m)
        G = close_generators(gens, budget=order)
        assert G.order == order
        _overgroup_cache[key] = G
    return _overgroup_cache[key]


def torus_members(H: GroupTable, m: int) -> frozenset[int]:
    """Element indices of the torus part (closure of the two translations)."""
    if m == 1:
        return frozenset([0])
    return H.subgroup_closure([H.generators[0], H.generators[1]])


def actor_group(family_id: int) -> GroupTable:
    """The finite matrix group G_f as an abstract permutation group."""
    fam = family_by_id(family_id)
    gens = []
    for M in fam.gens:
        images = list(range(_ACTOR_MODULUS * _ACTOR_MODULUS))
        _row_action_perm(M, _ACTOR_MODULUS, 0, len(images), images)
        gens.append(tuple(images))
    G = close_generators(gens)
    assert G.order == fam.actor_order
    return G


def _actor_matrices(family_id: int) -> dict[int, tuple[tuple[int, int], tuple[int, int]]]:
    """Element index of actor_group -> its integer matrix (tracked via words)."""
    fam = family_by_id(family_id)
    A = actor_group(family_id)
    mats: dict[int, tuple] = {0: ((1, 0), (0, 1))}
    gen_mats = dict(zip(A.generators, fam.gens))
    frontier = [0]
    while frontier:
        x = frontier.pop()
        for g in A.generators:
            y = A.mul(x, g)
            if y not in mats:
                Mx, Mg = mats[x], gen_mats[g]
                # right action composes left-to-right: v (Mx Mg)
                prod = tuple(
                    tuple(
                        sum(Mx[i][k] * Mg[k][j] for k in range(2)) for j in range(2)
                    )
                    for i in range(2)
                )
                mats[y] = prod
                frontier.append(y)
    return mats


def smooth_moduli(limit: int, forbidden: tuple[int, ...]) -> list[int]:
    out = []
    for m in range(1, limit + 1):
        if all(m % p for p in forbidden):
            out.append(m)
    return out


MATERIALIZATION_BUDGET = 2500


@dataclass(frozen=True)
class DuncanWitness:
    case: str
    detail: str
    embedding: EmbeddingWitness | None


def duncan_upper(
    G: GroupTable,
    rd: int,
    psl27: GroupTable,
    s5: GroupTable,
    budget: int | None = 500_000,
) -> DuncanWitness | None:
    """First certified membership in one of the seven ed<=2 targets, or None.

    Case order: (i) GL2 via rd <= 2, (vii) S5, (vi) PSL2(F7), then torus
    families (ii)-(v) over allowed-prime-smooth moduli. A found embedding is
    unconditionally sound; None only means the bounded search found nothing.
    """
    if rd <= 2:
        return DuncanWitness("i", f"rd = {rd} <= 2 so G embeds in GL2(C)", None)
    for case, H, name in (("vii", s5, "S5"), ("vi", psl27, "PSL2(F7)")):
        if H.order % G.order == 0:
            try:
                w = find_monomorphism(G, H, budget)
            except BudgetExhausted:
                w = None
            if w is not None:
                return DuncanWitness(case, f"embeds in {name}", w)
    for fam in FAMILIES:
        cap = 12 * G.order
        for m in smooth_moduli(cap, fam.forbidden_primes):
            order = m * m * fam.actor_order
            if order > MATERIALIZATION_BUDGET:
                break
            if order % G.order:
                continue
            H = torus_family_overgroup(fam.family_id, m)
            try:
                w = find_monomorphism(G, H, budget)
            except BudgetExhausted:
                continue
            if w is None:
                continue
            torus = torus_members(H, m)
            inter = sum(1 for t in w.element_map if t in torus)
            if any(inter % p == 0 for p in fam.forbidden_primes):
                continue
            return DuncanWitness(
                fam.case,
                f"embeds in (Z/{m})^2 : {fam.actor_name} with |G n T| = {inter}",
                w,
            )
    return None


def _all_injective_homs(Q: GroupTable, F: GroupTable) -> list[tuple[int, ...]]:
    """Every injective homomorphism Q -> F as element maps (may be empty)."""
    if F.order % Q.order != 0:
        return []
    from .isomorphism import _close_partial, _fingerprint_tables, generating_sequence

    gens = generating_sequence(Q)
    if not gens:
        return [(0,) * 1] if Q.order == 1 else []
    q_orders, q_cents = _fingerprint_tables(Q)
    f_orders, f_cents = _fingerprint_tables(F)
    cands = [
        [
            j
            for j in range(F.order)
            if f_orders[j] == q_orders[g] and f_cents[j] >= q_cents[g]
        ]
        for g in gens
    ]
    out = []

    def extend(level: int, pmap: dict[int, int]) -> None:
        if level == len(gens):
            out.append(tuple(pmap[i] for i in range(Q.order)))
            return
        for img in cands[level]:
            nm = _close_partial(Q, F, pmap, gens[level], img)
            if nm is not None:
                extend(level + 1, nm)

    extend(0, {0: 0})
    return out


@dataclass(frozen=True)
class ExclusionReport:
    excluded: bool
    certificates: tuple[str, ...]  # one line per case when excluded
    obstruction: str | None  # why exclusion could NOT be certified


def duncan_exclusion(
    G: GroupTable,
    rd: int,
    psl27: GroupTable,
    s5: GroupTable,
) -> ExclusionReport:
    """Sound exclusion from all seven ed<=2 targets, or Inconclusive.

    For the torus cases, membership with G n T = N forces: N normal abelian of
    rank <= 2 with |N| coprime to the forbidden primes, an injective
    psi: G/N -> G_f, and an injective psi-equivariant N -> (Z/e)^2 with
    e = exponent(N). Universal failure of this necessary condition over all
    (N, psi) certifies exclusion for that family.
    """
    certs: list[str] = []
    if rd <= 2:
        return ExclusionReport(False, (), "rd <= 2: G embeds in GL2(C)")
    certs.append(f"(i) rd = {rd} > 2")
    for case, H, name in (("vi", psl27, "PSL2(F7)"), ("vii", s5, "S5")):
        if H.order % G.order != 0:
            certs.append(f"({case}) |G| = {G.order} does not divide {H.order}")
            continue
        w = find_monomorphism(G, H, budget=None)  # exhaustive
        if w is not None:
            return ExclusionReport(False, (), f"G embeds in {name}")
        certs.append(f"({case}) exhaustive search: no embedding into {name}")

    normals, _ = normal_subgroups(G)
    abelian_normals = []
    for N in normals:
        NG = N.as_group()
        if not NG.is_abelian:
            continue
        inv = abelian_invariants(NG)
        rank = structural_invariants(NG).rank
        if rank > 2:
            continue
        abelian_normals.append((N, NG, inv))

    for fam in FAMILIES:
        mats = _actor_matrices(fam.family_id)
        F = actor_group(fam.family_id)
        family_ok = True
        why = []
        for N, NG, inv in abelian_normals:
            if any(N.order % p == 0 for p in fam.forbidden_primes if N.order > 1):
                continue
            Q, proj = quotient_group(G, N)
            psis = _all_injective_homs(Q, F)
            if not psis:
                why.append(f"N of order {N.order}: no injective G/N -> {fam.actor_name}")
                continue
            for psi in psis:
                if _equivariant_injection_exists(G, N, NG, Q, proj, psi, mats):
                    family_ok = False
                    why.append(
                        f"N of order {N.order}: equivariant injection exists"
                    )
                    break
            else:
                why.append(
                    f"N of order {N.order}: {len(psis)} injective psi, "
                    "no equivariant injection into (Z/e)^2"
                )
            if not family_ok:
                break
        if not family_ok:
            return ExclusionReport(
                False,
                (),
                f"case ({fam.case}): necessary condition passes; membership unresolved",
            )
        certs.append(f"({fam.case}) " + ("; ".join(why) if why else "no candidate N at all"))
    return ExclusionReport(True, tuple(certs), None)


def _equivariant_injection_exists(
    G: GroupTable,
    N: Subgroup,
    NG: GroupTable,
    Q: GroupTable,
    proj: list[int],
    psi: tuple[int, ...],
    mats: dict[int, tuple],
) -> bool:
    """Injective hom N -> (Z/e)^2 intertwining conjugation with psi's matrices."""
    e = NG.exponent
    if e == 1:
        return True  # trivial N embeds trivially; condition is vacuous
    members = sorted(N.members)
    pos = {m: i for i, m in enumerate(members)}
    # generators of N inside G, and lifts of Q's generators
    gens_idx = Subgroup(G, N.members).generators()
    lifts = []
    for qg in Q.generators:
        g = next(i for i in range(G.order) if proj[i] == qg)
        lifts.append(g)

    # abstract structure of N: use NG element order to bound candidate images
    def order_in_N(x: int) -> int:
        return G.element_orders[x]

    def images_ok(assign: dict[int, tuple[int, int]]) -> bool:
        # extend multiplicatively over <assigned>, checking consistency
        val = {0: (0, 0)}
        frontier = [0]
        while frontier:
            x = frontier.pop()
            for g, vg in assign.items():
                y = G.mul(x, g)
                vy = ((val[x][0] + vg[0]) % e, (val[x][1] + vg[1]) % e)
                if y in val:
                    if val[y] != vy:
                        return False
                else:
                    val[y] = vy
                    frontier.append(y)
        if len(val) != len(members):
            return False
        if len(set(val.values())) != len(members):
            return False  # not injective
        # equivariance on generators of N for every Q-generator
        for qg, g in zip(Q.generators, lifts):
            M = mats[psi[qg]]
            for n in assign:
                vn = val[n]
                conj = G.conj(n, g)
                want = (
                    (vn[0] * M[0][0] + vn[1] * M[1][0]) % e,
                    (vn[0] * M[0][1] + vn[1] * M[1][1]) % e,
                )
                if val.get(conj) != want:
                    return False
        return True

    def search(idx: int, assign: dict[int, tuple[int, int]]) -> bool:
        if idx == len(gens_idx):
            return images_ok(assign)
        g = gens_idx[idx]
        o = order_in_N(g)
        for va in range(e):
            for vb in range(e):
                if (va * o) % e or (vb * o) % e:
                    continue  # image order must divide order of g
                assign[g] = (va, vb)
                if search(idx + 1, assign):
                    return True
                del assign[g]
        return False

    return search(0, {})
