"""Minimal faithful representation dimension.

A character set is faithful iff its kernels intersect trivially, iff every
minimal normal subgroup escapes some kernel. Restricting to multiplicity-free
sets is lossless (repeating a summand adds dimension without shrinking the
kernel), and characters sharing a kernel can be thinned to the cheapest one.
The search is branch-and-bound over this set cover; ties are broken toward the
lexicographically least witness.
"""

from __future__ import annotations

from dataclasses import dataclass

from .chartab import CharacterTable
from .grouptable import GroupTable, minimal_normal_subgroups, structural_invariants


class RankMismatch(Exception):
    pass


@dataclass(frozen=True)
class FaithfulWitness:
    chosen_characters: tuple[int, ...]  # indices into the character table
    total_degree: int
    kernel_intersection_order: int

    def __post_init__(self):
        assert self.kernel_intersection_order == 1 or not self.chosen_characters


def representation_dimension(
    G: GroupTable, table: CharacterTable
) -> tuple[int, FaithfulWitness]:
    if G.order == 1:
        return 0, FaithfulWitness((), 0, 1)
    minimals = minimal_normal_subgroups(G)
    assert minimals, "nontrivial group has a minimal normal subgroup"

    # candidate characters: cheapest representative per distinct kernel
    best_for_kernel: dict[frozenset[int], int] = {}
    for i, k in enumerate(table.kernels):
        cur = best_for_kernel.get(k.members)
        if cur is None or table.degrees[i] < table.degrees[cur]:
            best_for_kernel[k.members] = i
    cands = sorted(best_for_kernel.values())
    cands = [i for i in cands if table.kernels[i].order < G.order]

    masks = []
    for i in cands:
        ker = table.kernels[i].members
        m = 0
        for b, M in enumerate(minimals):
            if not M.members <= ker:
                m |= 1 << b
        masks.append(m)
    full = (1 << len(minimals)) - 1
    degs = [table.degrees[i] for i in cands]

    best = _greedy_value(masks, degs, full)
    best = _branch_and_bound(masks, degs, full, best)
    chosen = _lex_least_optimum(masks, degs, full, best)
    assert chosen is not None, "regular representation guarantees a cover"

    witness_idx = tuple(cands[i] for i in chosen)
    inter = frozenset(range(G.order))
    for i in witness_idx:
        inter &= table.kernels[i].members
    assert inter == frozenset([0]), "witness kernels must intersect trivially"
    for drop in range(len(witness_idx)):
        rest = frozenset(range(G.order))
        for j, i in enumerate(witness_idx):
            if j != drop:
                rest &= table.kernels[i].members
        assert rest != frozenset([0]), "witness must be irredundant"
    return best, FaithfulWitness(witness_idx, best, 1)


def _greedy_value(masks: list[int], degs: list[int], full: int) -> int:
    """Cheap upper bound: repeatedly take the best degree-per-new-cover ratio."""
    covered = 0
    total = 0
    while covered != full:
        pick = None
        pick_key = None
        for i in range(len(masks)):
            gain = bin(masks[i] & ~covered).count("1")
            if gain == 0:
                continue
            key = (degs[i] / gain, i)
            if pick_key is None or key < pick_key:
                pick, pick_key = i, key
        assert pick is not None
        covered |= masks[pick]
        total += degs[pick]
    return total


def _branch_and_bound(
    masks: list[int], degs: list[int], full: int, upper: int
) -> int:
    n_bits = full.bit_length()
    coverers: list[list[int]] = [
        [i for i in range(len(masks)) if masks[i] >> b & 1] for b in range(n_bits)
    ]
    min_cost: list[int] = [min(degs[i] for i in cs) for cs in coverers]

    best = upper

    def bound(covered: int) -> int:
        lb = 0
        for b in range(n_bits):
            if not covered >> b & 1:
                lb = max(lb, min_cost[b])
        return lb

    def recurse(covered: int, cost: int) -> None:
        nonlocal best
        if covered == full:
            best = min(best, cost)
            return
        if cost + bound(covered) >= best:
            return
        # branch on the uncovered element with fewest coverers
        target = min(
            (b for b in range(n_bits) if not covered >> b & 1),
            key=lambda b: len(coverers[b]),
        )
        for i in coverers[target]:
            recurse(covered | masks[i], cost + degs[i])

    recurse(0, 0)
    return best


def _lex_least_optimum(
    masks: list[int], degs: list[int], full: int, value: int
) -> tuple[int, ...] | None:
    """First subset, in lexicographic index order, of total degree `value`
    covering everything; DFS include-first gives the least witness."""
    n = len(masks)
    suffix_mask = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix_mask[i] = suffix_mask[i + 1] | masks[i]

    def dfs(i: int, covered: int, cost: int, picked: tuple[int, ...]):
        if cost > value:
            return None
        if covered == full:
            return picked if cost == value else None
        if i == n:
            return None
        if covered | suffix_mask[i] != full:
            return None
        with_i = dfs(i + 1, covered | masks[i], cost + degs[i], picked + (i,))
        if with_i is not None:
            return with_i
        return dfs(i + 1, covered, cost, picked)

    return dfs(0, 0, 0, ())


def brute_force_rd(G: GroupTable, table: CharacterTable) -> int:
    """Independent oracle: exhaust all subsets of irreducibles (<= 2^r)."""
    if G.order == 1:
        return 0
    r = table.n_irreducibles
    best = None
    for mask in range(1, 1 << r):
        inter = frozenset(range(G.order))
        total = 0
        for i in range(r):
            if mask >> i & 1:
                inter &= table.kernels[i].members
                total += table.degrees[i]
        if inter == frozenset([0]) and (best is None or total < best):
            best = total
    assert best is not None
    return best


def abelian_rd_check(G: GroupTable, table: CharacterTable) -> int:
    """For abelian G: rd = rank; asserts agreement with the search."""
    assert G.is_abelian
    rank = structural_invariants(G).rank
    rd, _ = representation_dimension(G, table)
    if rd != rank:
        raise RankMismatch(f"abelian rd {rd} != rank {rank}")
    return rank
