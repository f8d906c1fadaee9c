"""Group-construction language: parsing, pretty-printing, realization.

Grammar (semidirect binds tighter than direct product, both left-associative):

    expr   := prod
    prod   := semi { "x" semi }
    semi   := atom [ ":" atom actionBlock ]
    atom   := kind "(" int { "," int } ")" [ "^" int ]
            | "perm" "[" cycles { "," cycles } "]"
            | "(" expr ")"
    kind   := "C" | "D" | "Q" | "QD" | "S" | "A" | "SL" | "GL" | "PSL" | "TF"
    actionBlock := "[" ("act" clause { ";" clause } | "mat" rows) "]"
    clause := ident "->" ident "^" int

D(n), Q(n), QD(n) take the group ORDER as parameter. Matrix rows are either
digit strings ("0100") or comma-separated integers ("0,-1 1,-1"); matrices for
successive actor generators are separated by ";". Matrix action on the normal
part C(m1) x ... x C(mk) is v -> M v on column vectors, coordinate i reduced
mod m_i. TF(f, m) is the torus-family overgroup (Z/m)^2 : G_f, f in 1..4.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from math import gcd

from . import perms
from .grouptable import GroupTable, close_generators


class DslSyntaxError(Exception):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class DslSemanticError(Exception):
    pass


class ActionNotAutomorphism(DslSemanticError):
    pass


class RealizationTooLarge(DslSemanticError):
    pass


# ---------------------------------------------------------------------------
# AST

ATOM_KINDS = ("C", "D", "Q", "QD", "S", "A", "SL", "GL", "PSL", "TF")


@dataclass(frozen=True)
class Atom:
    kind: str
    params: tuple[int, ...]
    power: int = 1
    span: tuple[int, int] = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class ExplicitPerms:
    degree: int
    gens: tuple[str, ...]  # cycle strings
    span: tuple[int, int] = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class DirectProduct:
    parts: tuple["Construction", ...]
    span: tuple[int, int] = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class ExponentAction:
    exponents: tuple[int, ...]  # one per actor generator


@dataclass(frozen=True)
class MatrixAction:
    matrices: tuple[tuple[tuple[int, ...], ...], ...]  # one matrix per actor gen


ActionSpec = ExponentAction | MatrixAction


@dataclass(frozen=True)
class Semidirect:
    normal: "Construction"
    actor: "Construction"
    action: ActionSpec
    span: tuple[int, int] = field(default=(0, 0), compare=False)


Construction = Atom | ExplicitPerms | DirectProduct | Semidirect


# ---------------------------------------------------------------------------
# Lexer / parser

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<arrow>->)|(?P<int>-?\d+)|(?P<ident>[A-Za-z]+)|(?P<punct>[()\[\],:;^]))"
)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str) -> DslSyntaxError:
        return DslSyntaxError(msg, self.pos)

    def _skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> tuple[str, str] | None:
        m = _TOKEN_RE.match(self.text, self.pos)
        if m is None:
            return None
        kind = m.lastgroup
        return kind, m.group(kind)

    def take(self) -> tuple[str, str]:
        m = _TOKEN_RE.match(self.text, self.pos)
        if m is None:
            raise self.error("unexpected character")
        self.pos = m.end()
        return m.lastgroup, m.group(m.lastgroup)

    def expect(self, kind: str, value: str | None = None) -> str:
        got = self.peek()
        if got is None or got[0] != kind or (value is not None and got[1] != value):
            want = value or kind
            raise self.error(f"expected {want!r}")
        return self.take()[1]

    def at(self, kind: str, value: str | None = None) -> bool:
        got = self.peek()
        return got is not None and got[0] == kind and (value is None or got[1] == value)

    # grammar ---------------------------------------------------------------

    def parse_expr(self) -> Construction:
        start = self.pos
        parts = [self.parse_semi()]
        while self.at("ident", "x"):
            self.take()
            parts.append(self.parse_semi())
        if len(parts) == 1:
            return parts[0]
        flat: list[Construction] = []
        for p in parts:
            flat.extend(p.parts if isinstance(p, DirectProduct) else [p])
        return DirectProduct(tuple(flat), span=(start, self.pos))

    def parse_semi(self) -> Construction:
        start = self.pos
        left = self.parse_atom()
        if not self.at("punct", ":"):
            return left
        self.take()
        actor = self.parse_atom()
        action = self.parse_action_block()
        return Semidirect(left, actor, action, span=(start, self.pos))

    def parse_atom(self) -> Construction:
        start = self.pos
        if self.at("punct", "("):
            self.take()
            inner = self.parse_expr()
            self.expect("punct", ")")
            return inner
        if self.at("ident", "perm"):
            self.take()
            return self._parse_perm_block(start)
        if not self.at("ident"):
            raise self.error("expected an atom")
        kind = self.take()[1]
        if kind not in ATOM_KINDS:
            raise self.error(f"unknown constructor {kind!r}")
        self.expect("punct", "(")
        params = [int(self.expect("int"))]
        while self.at("punct", ","):
            self.take()
            params.append(int(self.expect("int")))
        self.expect("punct", ")")
        power = 1
        if self.at("punct", "^"):
            self.take()
            power = int(self.expect("int"))
            if power < 1:
                raise self.error("power must be positive")
        return Atom(kind, tuple(params), power, span=(start, self.pos))

    def _raw_until_bracket(self) -> str:
        """Consume raw text up to an unmatched ']' (no nesting inside)."""
        end = self.text.find("]", self.pos)
        if end < 0:
            raise self.error("missing ']'")
        raw = self.text[self.pos : end]
        self.pos = end + 1
        return raw

    def _parse_perm_block(self, start: int) -> ExplicitPerms:
        self.expect("punct", "[")
        raw = self._raw_until_bracket()
        gen_texts = [t.strip() for t in raw.split(",")]
        if not gen_texts or not all(gen_texts):
            raise self.error("empty perm generator list")
        parsed = [perms.parse_cycle_string(t) for t in gen_texts]
        degree = max(len(p) for p in parsed)
        canon = tuple(
            perms.cycle_string(perms.pad(p, degree)) for p in parsed
        )
        return ExplicitPerms(degree, canon, span=(start, self.pos))

    def parse_action_block(self) -> ActionSpec:
        self.expect("punct", "[")
        if self.at("ident", "act"):
            self.take()
            exps = [self._parse_act_clause()]
            while self.at("punct", ";"):
                self.take()
                exps.append(self._parse_act_clause())
            self.expect("punct", "]")
            return ExponentAction(tuple(exps))
        if self.at("ident", "mat"):
            self.take()
            raw = self._raw_until_bracket()
            return _parse_matrices(raw, self)
        raise self.error("expected 'act' or 'mat'")

    def _parse_act_clause(self) -> int:
        self.expect("ident")
        self.expect("arrow")
        self.expect("ident")
        self.expect("punct", "^")
        return int(self.expect("int"))

    def parse_complete(self) -> Construction:
        c = self.parse_expr()
        self._skip_ws()
        if self.pos != len(self.text):
            raise self.error("trailing input")
        return c


def _parse_matrices(raw: str, parser: _Parser) -> MatrixAction:
    mats = []
    for chunk in raw.split(";"):
        rows = []
        for tok in chunk.split():
            if "," in tok:
                rows.append(tuple(int(t) for t in tok.split(",")))
            else:
                if not re.fullmatch(r"\d+", tok):
                    raise parser.error(f"bad matrix row {tok!r}")
                rows.append(tuple(int(ch) for ch in tok))
        if not rows:
            raise parser.error("empty matrix")
        if any(len(r) != len(rows) for r in rows):
            raise parser.error("matrix must be square")
        mats.append(tuple(rows))
    return MatrixAction(tuple(mats))


def parse_construction(text: str) -> Construction:
    return _Parser(text).parse_complete()


# ---------------------------------------------------------------------------
# Pretty printer (parse . pretty == identity on ASTs)


def pretty(c: Construction) -> str:
    if isinstance(c, Atom):
        base = f"{c.kind}({','.join(str(p) for p in c.params)})"
        return base if c.power == 1 else f"{base}^{c.power}"
    if isinstance(c, ExplicitPerms):
        return "perm[" + ", ".join(c.gens) + "]"
    if isinstance(c, DirectProduct):
        return " x ".join(
            f"({pretty(p)})" if isinstance(p, DirectProduct) else pretty(p)
            for p in c.parts
        )
    if isinstance(c, Semidirect):
        n = pretty(c.normal)
        if isinstance(c.normal, (DirectProduct, Semidirect)):
            n = f"({n})"
        a = pretty(c.actor)
        if isinstance(c.actor, (DirectProduct, Semidirect)):
            a = f"({a})"
        return f"{n} : {a} {_pretty_action(c.action)}"
    raise TypeError(type(c))


def _pretty_action(a: ActionSpec) -> str:
    if isinstance(a, ExponentAction):
        body = "; ".join(f"a -> a^{e}" for e in a.exponents)
        return f"[act {body}]"
    rows_per_mat = [
        " ".join(",".join(str(v) for v in row) for row in mat) for mat in a.matrices
    ]
    return "[mat " + " ; ".join(rows_per_mat) + "]"


# ---------------------------------------------------------------------------
# Realization


def _cyclic_moduli(c: Construction) -> tuple[int, ...] | None:
    """Cyclic factor list when c is a product of C atoms, else None."""
    if isinstance(c, Atom) and c.kind == "C":
        return c.params * c.power
    if isinstance(c, DirectProduct):
        out: list[int] = []
        for p in c.parts:
            m = _cyclic_moduli(p)
            if m is None:
                return None
            out.extend(m)
        return tuple(out)
    return None


def _atom_generators(a: Atom) -> tuple[list[perms.Perm], int]:
    """Generator perms and the expected order for one unpowered atom."""
    kind, p = a.kind, a.params
    if kind == "C":
        degree = sum(p)
        gens = []
        off = 0
        order = 1
        for n in p:
            assert n >= 1, "C parameter must be >= 1"
            cyc = tuple(
                off + ((i - off + 1) % n) if off <= i < off + n else i
                for i in range(degree)
            )
            gens.append(cyc)
            off += n
            order *= n
        return gens, order
    if kind == "D":
        (n,) = p
        assert n >= 2 and n % 2 == 0, "D parameter is the group order, even"
        m = n // 2
        if m == 1:
            return [(1, 0)], 2
        if m == 2:
            return [perms.from_cycles(4, [(0, 1)]), perms.from_cycles(4, [(2, 3)])], 4
        r = tuple((i + 1) % m for i in range(m))
        s = tuple((-i) % m for i in range(m))
        return [r, s], n
    if kind == "Q":
        (n,) = p
        assert n % 4 == 0 and n >= 8, "Q parameter is the group order, 4m >= 8"
        two_m = n // 2
        m = n // 4
        ga = [0] * n
        gb = [0] * n
        for k in range(two_m):
            for l in (0, 1):
                pt = k + two_m * l
                ga[pt] = (k + 1) % two_m + two_m * l
                if l == 0:
                    gb[pt] = (-k) % two_m + two_m
                else:
                    gb[pt] = (m - k) % two_m
        return [tuple(ga), tuple(gb)], n
    if kind == "QD":
        (n,) = p
        assert n >= 16 and n & (n - 1) == 0, "QD parameter is a 2-power >= 16"
        half = n // 2
        e = half // 2 - 1  # s r s = r^(2^(k-2) - 1)
        r = tuple((i + 1) % half for i in range(half))
        s = tuple((e * i) % half for i in range(half))
        return [r, s], n
    if kind == "S":
        (n,) = p
        assert n >= 1
        if n == 1:
            return [perms.identity(1)], 1
        fact = 1
        for i in range(2, n + 1):
            fact *= i
        gens = [perms.from_cycles(n, [(0, 1)])]
        if n > 2:
            gens.append(tuple((i + 1) % n for i in range(n)))
        return gens, fact
    if kind == "A":
        (n,) = p
        assert n >= 3, "A parameter must be >= 3"
        fact = 1
        for i in range(2, n + 1):
            fact *= i
        gens = [perms.from_cycles(n, [(0, 1, 2)])]
        if n > 3:
            if n % 2 == 1:
                gens.append(tuple((i + 1) % n for i in range(n)))
            else:
                gens.append(
                    tuple(0 if i == 0 else (i % (n - 1)) + 1 for i in range(n))
                )
        return gens, fact // 2
    if kind in ("SL", "GL", "PSL"):
        return _matrix_group_generators(kind, p)
    if kind == "TF":
        f, m = p
        from .duncan import torus_family_generators

        return torus_family_generators(f, m)
    raise DslSemanticError(f"cannot realize atom kind {kind!r}")


def _matrix_group_generators(kind: str, p: tuple[int, ...]) -> tuple[list[perms.Perm], int]:
    n, q = p
    assert n == 2, "only 2x2 matrix groups are supported"
    assert all(q % d for d in range(2, q)) and q >= 2, "field size must be prime"
    if kind == "PSL":
        # action on the projective line {0..q-1, infinity=q}
        inf = q
        shift_ = tuple((x + 1) % q for x in range(q)) + (inf,)
        inv_img = [0] * (q + 1)
        inv_img[0] = inf
        inv_img[inf] = 0
        for x in range(1, q):
            inv_img[x] = (-pow(x, q - 2, q)) % q
        order = q * (q * q - 1) // (2 if q > 2 else 1)
        return [shift_, tuple(inv_img)], order
    # SL/GL act on the q^2-1 nonzero vectors of F_q^2
    vecs = [(a, b) for a in range(q) for b in range(q) if (a, b) != (0, 0)]
    vindex = {v: i for i, v in enumerate(vecs)}

    def mat_perm(M: tuple[tuple[int, int], tuple[int, int]]) -> perms.Perm:
        return tuple(
            vindex[
                (
                    (M[0][0] * a + M[0][1] * b) % q,
                    (M[1][0] * a + M[1][1] * b) % q,
                )
            ]
            for a, b in vecs
        )

    gens = [mat_perm(((1, 1), (0, 1))), mat_perm(((1, 0), (1, 1)))]
    order = q * (q * q - 1)
    if kind == "GL":
        g = _primitive_root(q)
        gens.append(mat_perm(((g, 0), (0, 1))))
        order *= q - 1
    return gens, order


def _primitive_root(q: int) -> int:
    for g in range(2, q):
        seen = set()
        x = 1
        for _ in range(q - 1):
            x = x * g % q
            seen.add(x)
        if len(seen) == q - 1:
            return g
    raise ValueError(f"no primitive root mod {q}")


def realize_construction(c: Construction, budget: int = 2500) -> GroupTable:
    gens, order = _realized_generators(c)
    try:
        G = close_generators(gens, budget=budget)
    except Exception as e:
        if e.__class__.__name__ == "ClosureBudgetExceeded":
            raise RealizationTooLarge(str(e)) from e
        raise
    assert G.order == order, f"realized order {G.order} != expected {order} for {pretty(c)}"
    return G


def _realized_generators(c: Construction) -> tuple[list[perms.Perm], int]:
    if isinstance(c, Atom):
        if c.power == 1:
            return _atom_generators(c)
        single = Atom(c.kind, c.params, 1)
        return _realized_generators(
            DirectProduct(tuple(single for _ in range(c.power)))
        )
    if isinstance(c, ExplicitPerms):
        gen_perms = [perms.parse_cycle_string(t, c.degree) for t in c.gens]
        G = close_generators(gen_perms)
        return gen_perms, G.order
    if isinstance(c, DirectProduct):
        blocks = [_realized_generators(p) for p in c.parts]
        degree = sum(len(g[0][0]) for g in blocks)
        gens: list[perms.Perm] = []
        off = 0
        order = 1
        for block_gens, block_order in blocks:
            d = len(block_gens[0])
            for g in block_gens:
                gens.append(perms.shift(g, off, degree))
            off += d
            order *= block_order
        return gens, order
    if isinstance(c, Semidirect):
        return _realize_semidirect(c)
    raise TypeError(type(c))


def _matrices_from_action(
    action: ActionSpec, moduli: tuple[int, ...], n_actor_gens: int
) -> list[list[list[int]]]:
    k = len(moduli)
    if isinstance(action, ExponentAction):
        exps = action.exponents
        if len(exps) == 1 and n_actor_gens > 1:
            raise ActionNotAutomorphism(
                "one exponent given for a multi-generator actor"
            )
        if len(exps) != n_actor_gens:
            raise ActionNotAutomorphism(
                f"{len(exps)} action entries for {n_actor_gens} actor generators"
            )
        mats = []
        for e in exps:
            mats.append([[e if i == j else 0 for j in range(k)] for i in range(k)])
        return mats
    mats = [list(map(list, m)) for m in action.matrices]
    if len(mats) != n_actor_gens:
        raise ActionNotAutomorphism(
            f"{len(mats)} matrices for {n_actor_gens} actor generators"
        )
    for m in mats:
        if len(m) != k:
            raise ActionNotAutomorphism(f"matrix size {len(m)} != {k} cyclic factors")
    return mats


def _realize_semidirect(c: Semidirect) -> tuple[list[perms.Perm], int]:
    moduli = _cyclic_moduli(c.normal)
    if moduli is None:
        raise DslSemanticError(
            "semidirect normal part must be a product of cyclic factors"
        )
    actor_gens, actor_order = _realized_generators(c.actor)
    mats = _matrices_from_action(c.action, moduli, len(actor_gens))
    k = len(moduli)
    n_points = 1
    for m in moduli:
        n_points *= m
    # mixed-modulus well-definedness: M[i][j] * m_j must vanish mod m_i
    for M in mats:
        for i in range(k):
            for j in range(k):
                if (M[i][j] * moduli[j]) % moduli[i] != 0:
                    raise ActionNotAutomorphism(
                        f"entry {M[i][j]} at ({i},{j}) ill-defined for moduli {moduli}"
                    )

    strides = [0] * k
    acc = 1
    for i in range(k - 1, -1, -1):
        strides[i] = acc
        acc *= moduli[i]

    def point(coords: tuple[int, ...]) -> int:
        return sum(c_ * s for c_, s in zip(coords, strides))

    def coords(pt: int) -> tuple[int, ...]:

        out = []
        for i in range(k):
            out.append((pt // strides[i]) % moduli[i])
        return tuple(out)

    all_coords = [coords(p) for p in range(n_points)]
    actor_degree = len(actor_gens[0])
    degree = n_points + actor_degree

    gens: list[perms.Perm] = []
    # translations for each cyclic factor of the normal part
    for i in range(k):
        images = list(range(degree))
        for pt, cs in enumerate(all_coords):
            cs2 = list(cs)
            cs2[i] = (cs2[i] + 1) % moduli[i]
            images[pt] = point(tuple(cs2))
        gens.append(tuple(images))
    # actor generators: matrix on normal points, own action on actor points
    for M, ag in zip(mats, actor_gens):
        images = list(range(degree))
        hit = set()
        for pt, cs in enumerate(all_coords):
            new = tuple(
                sum(M[i][j] * cs[j] for j in range(k)) % moduli[i] for i in range(k)
            )
            images[pt] = point(new)
            hit.add(images[pt])
        if len(hit) != n_points:
            raise ActionNotAutomorphism("action matrix is not invertible")
        for i, v in enumerate(ag):
            images[n_points + i] = n_points + v
        gens.append(tuple(images))

    expected = n_points * actor_order
    probe = close_generators(gens, budget=max(2500, expected))
    if probe.order != expected:
        raise ActionNotAutomorphism(
            f"action does not define a homomorphism: closure {probe.order} != "
            f"{n_points} * {actor_order}"
        )
    return gens, expected


def realize(text: str) -> GroupTable:
    return realize_construction(parse_construction(text))
