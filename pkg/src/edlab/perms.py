"""Permutations on {0, ..., degree-1} stored as tuples of images."""

from __future__ import annotations

from math import gcd

Perm = tuple[int, ...]


def identity(degree: int) -> Perm:
    return tuple(range(degree))


def is_perm(p: Perm) -> bool:
    return sorted(p) == list(range(len(p)))


def compose(p: Perm, q: Perm) -> Perm:
    """(p*q)(x) = p(q(x)): apply q first, then p."""
    return tuple(p[q[x]] for x in range(len(p)))


def inverse(p: Perm) -> Perm:
    inv = [0] * len(p)
    for i, v in enumerate(p):
        inv[v] = i
    return tuple(inv)


def perm_order(p: Perm) -> int:
    n = len(p)
    seen = [False] * n
    order = 1
    for i in range(n):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        order = order * length // gcd(order, length)
    return order


def perm_power(p: Perm, k: int) -> Perm:
    n = len(p)
    if k < 0:
        p, k = inverse(p), -k
    result = identity(n)
    base = p
    while k:
        if k & 1:
            result = compose(base, result)
        base = compose(base, base)
        k >>= 1
    return result


def cycles(p: Perm) -> list[tuple[int, ...]]:
    """Nontrivial cycles, each starting at its smallest point, sorted by that point."""
    seen = [False] * len(p)
    out = []
    for i in range(len(p)):
        if seen[i] or p[i] == i:
            seen[i] = True
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = p[j]
        out.append(tuple(cyc))
    return out


def cycle_string(p: Perm) -> str:
    cs = cycles(p)
    if not cs:
        return "()"
    return "".join("(" + " ".join(str(x) for x in c) + ")" for c in cs)


def from_cycles(degree: int, cycle_list: list[tuple[int, ...]]) -> Perm:
    images = list(range(degree))
    for cyc in cycle_list:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            images[a] = b
    p = tuple(images)
    assert is_perm(p), f"cycles do not define a permutation: {cycle_list}"
    return p


def parse_cycle_string(text: str, degree: int | None = None) -> Perm:
    """Parse "(0 1 2)(3 4)" into a Perm; points may be comma- or space-separated."""
    text = text.strip()
    if text in ("()", ""):
        return identity(degree or 1)
    assert text.startswith("(") and text.endswith(")"), f"bad cycle string: {text!r}"
    cycle_list = []
    maxpt = 0
    for chunk in text[1:-1].split(")("):
        pts = tuple(int(t) for t in chunk.replace(",", " ").split())
        assert len(pts) == len(set(pts)) >= 1, f"bad cycle: {chunk!r}"
        maxpt = max(maxpt, max(pts))
        cycle_list.append(pts)
    deg = degree if degree is not None else maxpt + 1
    assert deg > maxpt, f"cycle point {maxpt} exceeds degree {deg}"
    return from_cycles(deg, cycle_list)


def pad(p: Perm, degree: int) -> Perm:
    """Extend p to act on a larger point set, fixing the new points."""
    assert degree >= len(p)
    return p + tuple(range(len(p), degree))


def shift(p: Perm, offset: int, degree: int) -> Perm:
    """Embed p acting on points [offset, offset+len(p)) inside {0..degree-1}."""
    images = list(range(degree))
    for i, v in enumerate(p):
        images[offset + i] = offset + v
    return tuple(images)
