"""Presentations: free words, finite presentations, pc presentations, formats.

Two kinds of presentation travel through the package. A finite presentation
(FpPresentation) is a list of relator words over named generators; the .fpg
text format carries these, with an abbrev block for nested commutator
shorthands. A polycyclic power-commutator presentation (PcPresentation) fixes
a prime p and generators g1..gn of nondecreasing weight, with every g_i^p and
every [g_j, g_i] (j > i) rewritten as a normal word in strictly later
generators; the .pcp format carries these together with generator names,
weights, and definition tags.

Sparse convention: an omitted power or commutator relation means the trivial
relation (g_i^p = 1, [g_j, g_i] = 1). Both formatters emit a canonical
normalized form, and parse(format(x)) reproduces x exactly.

The two presentation families used throughout (bifurcation and
metabelian-chain, parameterized by the exponent e of the first
abelianization factor) are instantiated here, both as explicit pc
presentations and as compact two-generator fp presentations.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import FormatError

# ---------------------------------------------------------------------------
# Free words


@dataclass(frozen=True)
class Word:
    """A word in named generators: a tuple of (name, exponent) factors.

    Adjacent factors with the same name are fused and zero exponents dropped,
    so equality is equality of the reduced factor tuple. This is free
    reduction only; no group relations are applied.
    """

    factors: tuple[tuple[str, int], ...]

    @staticmethod
    def of(factors) -> "Word":
        out: list[tuple[str, int]] = []
        for name, exp in factors:
            exp = int(exp)
            if exp == 0:
                continue
            if out and out[-1][0] == name:
                merged = out[-1][1] + exp
                out.pop()
                if merged:
                    out.append((name, merged))
            else:
                out.append((name, exp))
        return Word(tuple(out))

    @staticmethod
    def gen(name: str, exp: int = 1) -> "Word":
        return Word.of([(name, exp)])

    @staticmethod
    def identity() -> "Word":
        return Word(())

    def __mul__(self, other: "Word") -> "Word":
        return Word.of(self.factors + other.factors)

    def inverse(self) -> "Word":
        return Word(tuple((n, -e) for n, e in reversed(self.factors)))

    def power(self, k: int) -> "Word":
        if k == 0:
            return Word(())
        if len(self.factors) == 1:
            n, e = self.factors[0]
            return Word.of([(n, e * k)])
        base = self if k > 0 else self.inverse()
        reps = abs(k)
        if reps > 4096:
            raise FormatError("refusing huge power of a multi letter word")
        out = Word(())
        for _ in range(reps):
            out = out * base
        return out

    def commutator(self, other: "Word") -> "Word":
        return self.inverse() * other.inverse() * self * other

    @property
    def names(self) -> set[str]:
        return {n for n, _ in self.factors}

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return "*".join(n if e == 1 else f"{n}^{e}" for n, e in self.factors)


@dataclass(frozen=True)
class FpPresentation:
    """Named generators and relator words (relations w1 = w2 are stored as
    the relator w1 * w2^-1)."""

    generators: tuple[str, ...]
    relators: tuple[Word, ...]

    def __post_init__(self):
        if len(set(self.generators)) != len(self.generators):
            raise FormatError("duplicate generator names")
        known = set(self.generators)
        for w in self.relators:
            missing = w.names - known
            if missing:
                raise FormatError(f"relator uses unknown names {sorted(missing)}")


# ---------------------------------------------------------------------------
# .fpg parsing

_TOKEN = re.compile(
    r"\s+|#[^\n]*"
    r"|(?P<name>[A-Za-z][A-Za-z0-9_]*)"
    r"|(?P<int>-?\d+)"
    r"|(?P<punct>[\^\*\,\;\=\[\]\(\)\{\}])"
)

_KEYWORDS = {"gens", "abbrev", "rel"}


def _tokenize(text: str) -> list[tuple[str, str]]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormatError(f"bad character {text[pos]!r} at offset {pos}")
        pos = m.end()
        if m.lastgroup is None:
            continue
        toks.append((m.lastgroup, m.group()))
    return toks


class _TokenStream:
    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def next(self):
        t = self.peek()
        if t[0] is None:
            raise FormatError("unexpected end of input")
        self.i += 1
        return t

    def expect(self, value):
        kind, val = self.next()
        if val != value:
            raise FormatError(f"expected {value!r}, got {val!r}")
        return val

    def done(self):
        return self.i >= len(self.toks)


def parse_fp(text: str) -> FpPresentation:
    """Parse the .fpg format.

    Statements, each ';'-terminated: 'gens a, b;' declares generators;
    'abbrev s=[y,x], t=s^2;' binds shorthand names (expanded eagerly, may
    reference earlier abbrevs); 'rel w1, w2=w3;' adds relators, where an
    equation contributes w2*w3^-1. Words multiply with '*', commutators are
    [u,v], exponents are ^k or braced towers ^{3^5}, and '#' starts a
    comment.
    """
    ts = _TokenStream(_tokenize(text))
    gens: list[str] = []
    abbrevs: dict[str, Word] = {}
    relators: list[Word] = []

    def parse_exponent() -> int:
        ts.expect("^")
        kind, val = ts.next()
        if val == "{":
            _, base = ts.next()
            ts.expect("^")
            _, ex = ts.next()
            ts.expect("}")
            try:
                return int(base) ** int(ex)
            except ValueError:
                raise FormatError(f"bad braced exponent {{{base}^{ex}}}")
        if kind != "int":
            raise FormatError(f"expected integer exponent, got {val!r}")
        return int(val)

    def parse_atom() -> Word:
        kind, val = ts.next()
        if val == "[":
            u = parse_word()
            ts.expect(",")
            v = parse_word()
            ts.expect("]")
            return u.commutator(v)
        if val == "(":
            w = parse_word()
            ts.expect(")")
            return w
        if kind == "name":
            if val in abbrevs:
                return abbrevs[val]
            if val not in gens:
                raise FormatError(f"unknown name {val!r}")
            return Word.gen(val)
        raise FormatError(f"expected a word, got {val!r}")

    def parse_factor() -> Word:
        w = parse_atom()
        if ts.peek()[1] == "^":
            w = w.power(parse_exponent())
        return w

    def parse_word() -> Word:
        w = parse_factor()
        while ts.peek()[1] == "*":
            ts.next()
            w = w * parse_factor()
        return w

    while not ts.done():
        kind, val = ts.next()
        if val == "gens":
            while True:
                k, name = ts.next()
                if k != "name":
                    raise FormatError(f"bad generator name {name!r}")
                gens.append(name)
                k, sep = ts.next()
                if sep == ";":
                    break
                if sep != ",":
                    raise FormatError(f"expected , or ; got {sep!r}")
        elif val == "abbrev":
            while True:
                k, name = ts.next()
                if k != "name" or name in gens or name in abbrevs:
                    raise FormatError(f"bad abbrev name {name!r}")
                ts.expect("=")
                abbrevs[name] = parse_word()
                k, sep = ts.next()
                if sep == ";":
                    break
                if sep != ",":
                    raise FormatError(f"expected , or ; got {sep!r}")
        elif val == "rel":
            while True:
                w = parse_word()
                if ts.peek()[1] == "=":
                    ts.next()
                    w = w * parse_word().inverse()
                relators.append(w)
                k, sep = ts.next()
                if sep == ";":
                    break
                if sep != ",":
                    raise FormatError(f"expected , or ; got {sep!r}")
        else:
            raise FormatError(f"expected a statement keyword, got {val!r}")
    return FpPresentation(tuple(gens), tuple(relators))


def format_fp(fp: FpPresentation) -> str:
    """Canonical .fpg text: one gens line, one rel line per relator."""
    lines = ["gens " + ", ".join(fp.generators) + ";"]
    for w in fp.relators:
        lines.append(f"rel {w};")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Pc presentations

Def = tuple  # ('p', j) or ('c', j, i), 0-based generator indices
Row = tuple  # exponent vector, len n, entries in 0..p-1


@dataclass(frozen=True, eq=False)
class PcPresentation:
    """Power-commutator presentation for a finite p-group.

    power[i] is the normal word for g_i^p as an exponent tuple, or None for
    the trivial relation. comm[j] is a tuple of length j whose entry i is the
    normal word for [g_j, g_i], or None. definitions[i] tags how generator i
    arises: None for weight-1 generators, ('p', j) when the relation
    g_j^p = ... defines it, ('c', j, i) when [g_j, g_i] = ... does.

    Instances are identity-hashed (eq=False) and carry a private cache used
    by the collector.
    """

    p: int
    names: tuple[str, ...]
    weights: tuple[int, ...]
    definitions: tuple[Def | None, ...]
    power: tuple[Row | None, ...]
    comm: tuple[tuple[Row | None, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "_cache", {})
        self.validate()

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def order_exp(self) -> int:
        return self.n

    @property
    def pclass(self) -> int:
        return max(self.weights) if self.weights else 0

    def name_index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(name)

    def validate(self) -> None:
        n = len(self.names)
        if len(set(self.names)) != n:
            raise FormatError("duplicate generator names")
        if not (len(self.weights) == len(self.definitions) == len(self.power) == n
                and len(self.comm) == n):
            raise FormatError("field lengths disagree")
        if self.p < 2:
            raise FormatError("p must be a prime, and only p=3 is exercised")
        if any(w < 1 for w in self.weights):
            raise FormatError("weights must be positive")
        if any(self.weights[i] > self.weights[i + 1] for i in range(n - 1)):
            raise FormatError("weights must be nondecreasing")
        for i, row in enumerate(self.power):
            if row is None:
                continue
            self._check_row(row, i, f"power of g{i + 1}")
        for j, rows in enumerate(self.comm):
            if len(rows) != j:
                raise FormatError(f"comm row {j} has wrong length")
            for i, row in enumerate(rows):
                if row is None:
                    continue
                self._check_row(row, j, f"[g{j + 1}, g{i + 1}]")
        for i, d in enumerate(self.definitions):
            if d is None:
                continue
            if d[0] == "p":
                if not (0 <= d[1] < i):
                    raise FormatError(f"bad power definition on g{i + 1}")
            elif d[0] == "c":
                if not (0 <= d[2] < d[1] < i):
                    raise FormatError(f"bad commutator definition on g{i + 1}")
            else:
                raise FormatError(f"unknown definition tag {d!r}")

    def _check_row(self, row, after: int, what: str) -> None:
        if len(row) != self.n:
            raise FormatError(f"{what}: wrong length")
        if not any(row):
            raise FormatError(f"{what}: trivial relation must be None, not a zero row")
        for k, v in enumerate(row):
            if v and k <= after:
                raise FormatError(f"{what}: entry at g{k + 1} not strictly later")
            if not (0 <= v < self.p):
                raise FormatError(f"{what}: exponent out of range")

    def relations_as_words(self) -> tuple[Word, ...]:
        """Every pc relation as a relator word over this presentation's names.

        The word for g_i^p = w is g_i^p * w^-1; commutator relations expand
        [g_j, g_i] freely. Feeding these to the p-quotient of the free group
        on all n names reconstructs the same group.
        """
        out = []
        for i in range(self.n):
            lhs = Word.gen(self.names[i], self.p)
            out.append(lhs * self._row_word(self.power[i]).inverse())
        for j in range(self.n):
            for i in range(j):
                lhs = Word.gen(self.names[j]).commutator(Word.gen(self.names[i]))
                out.append(lhs * self._row_word(self.comm[j][i]).inverse())
        return tuple(out)

    def _row_word(self, row) -> Word:
        if row is None:
            return Word(())
        return Word.of([(self.names[k], v) for k, v in enumerate(row) if v])


def make_pc(p: int, table) -> PcPresentation:
    """Build a PcPresentation from a sparse description.

    table is a dict with keys:
      gens: list of (name, weight, def) where def is None, ('p', name) or
            ('c', name, name);
      pow:  dict name -> list of (name, exp);
      comm: dict (name, name) -> list of (name, exp), keys (later, earlier).
    """
    gens = table["gens"]
    names = tuple(g[0] for g in gens)
    weights = tuple(g[1] for g in gens)
    index = {nm: i for i, nm in enumerate(names)}
    n = len(names)

    def resolve_def(d):
        if d is None:
            return None
        if d[0] == "p":
            return ("p", index[d[1]])
        return ("c", index[d[1]], index[d[2]])

    defs = tuple(resolve_def(g[2]) for g in gens)

    def row_of(items) -> Row | None:
        row = [0] * n
        for nm, exp in items:
            row[index[nm]] = exp % p
        return tuple(row) if any(row) else None

    power: list[Row | None] = [None] * n
    for nm, items in table.get("pow", {}).items():
        power[index[nm]] = row_of(items)
    comm: list[list[Row | None]] = [[None] * j for j in range(n)]
    for (a, b), items in table.get("comm", {}).items():
        j, i = index[a], index[b]
        if j < i:
            raise FormatError(f"comm key ({a},{b}) not (later, earlier)")
        comm[j][i] = row_of(items)
    return PcPresentation(p, names, weights, defs,
                          tuple(power), tuple(tuple(r) for r in comm))


# ---------------------------------------------------------------------------
# .pcp parsing and formatting

_NF_FACTOR = re.compile(r"g(\d+)(?:\^(\d+))?$")


def parse_pc(text: str) -> PcPresentation:
    """Parse the .pcp format.

    Line oriented: 'pc p=3 n=8' header; one 'g<i> name=<s> w=<k> def=<d>'
    line per generator with d in {none, p:<j>, c:<j>,<k>} (1-based); then
    sparse 'pow g<i> = <word>' and 'comm g<j> g<i> = <word>' lines whose
    words are normal forms g<k>^<e> joined by '*' (or '1' for the identity).
    Omitted relations are trivial. '#' starts a comment.
    """
    p = n = None
    names: list[str] = []
    weights: list[int] = []
    defs: list[Def | None] = []
    power: list[Row | None] = []
    comm: list[list[Row | None]] = []
    seen_gens = 0

    def parse_nf(word: str) -> Row | None:
        word = word.strip()
        if word == "1":
            return None
        row = [0] * n
        for part in word.split("*"):
            m = _NF_FACTOR.match(part.strip())
            if not m:
                raise FormatError(f"bad normal form factor {part!r}")
            idx = int(m.group(1)) - 1
            exp = int(m.group(2) or 1)
            if not (0 <= idx < n):
                raise FormatError(f"generator g{idx + 1} out of range")
            if not (1 <= exp < p):
                raise FormatError(f"exponent {exp} out of range")
            if row[idx]:
                raise FormatError(f"repeated generator in normal form {word!r}")
            row[idx] = exp
        return tuple(row)

    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if fields[0] == "pc":
            kv = dict(f.split("=", 1) for f in fields[1:])
            p, n = int(kv["p"]), int(kv["n"])
            names = [f"g{i + 1}" for i in range(n)]
            weights = [0] * n
            defs = [None] * n
            power = [None] * n
            comm = [[None] * j for j in range(n)]
        elif fields[0].startswith("g") and "=" in line and fields[0][1:].isdigit():
            if p is None:
                raise FormatError("generator line before pc header")
            idx = int(fields[0][1:]) - 1
            if idx != seen_gens:
                raise FormatError("generator lines out of order")
            seen_gens += 1
            kv = dict(f.split("=", 1) for f in fields[1:])
            names[idx] = kv.get("name", f"g{idx + 1}")
            if "w" not in kv:
                raise FormatError(f"generator g{idx + 1} missing weight")
            weights[idx] = int(kv["w"])
            d = kv.get("def", "none")
            if d == "none":
                defs[idx] = None
            elif d.startswith("p:"):
                defs[idx] = ("p", int(d[2:]) - 1)
            elif d.startswith("c:"):
                a, b = d[2:].split(",")
                defs[idx] = ("c", int(a) - 1, int(b) - 1)
            else:
                raise FormatError(f"bad def field {d!r}")
        elif fields[0] == "pow":
            if seen_gens != n:
                raise FormatError("relation before all generator lines")
            m = re.match(r"pow\s+g(\d+)\s*=\s*(.+)$", line)
            if not m:
                raise FormatError(f"bad pow line {line!r}")
            power[int(m.group(1)) - 1] = parse_nf(m.group(2))
        elif fields[0] == "comm":
            if seen_gens != n:
                raise FormatError("relation before all generator lines")
            m = re.match(r"comm\s+g(\d+)\s+g(\d+)\s*=\s*(.+)$", line)
            if not m:
                raise FormatError(f"bad comm line {line!r}")
            j, i = int(m.group(1)) - 1, int(m.group(2)) - 1
            if not (0 <= i < j < n):
                raise FormatError(f"comm indices out of order in {line!r}")
            comm[j][i] = parse_nf(m.group(3))
        else:
            raise FormatError(f"unrecognized line {line!r}")
    if p is None:
        raise FormatError("missing pc header")
    if seen_gens != n:
        raise FormatError("missing generator lines")
    return PcPresentation(p, tuple(names), tuple(weights), tuple(defs),
                          tuple(power), tuple(tuple(r) for r in comm))


def format_pc(pc: PcPresentation) -> str:
    """Canonical .pcp text. parse_pc(format_pc(pc)) reproduces pc exactly."""
    lines = [f"pc p={pc.p} n={pc.n}"]
    for i in range(pc.n):
        d = pc.definitions[i]
        if d is None:
            dstr = "none"
        elif d[0] == "p":
            dstr = f"p:{d[1] + 1}"
        else:
            dstr = f"c:{d[1] + 1},{d[2] + 1}"
        lines.append(f"g{i + 1} name={pc.names[i]} w={pc.weights[i]} def={dstr}")

    def nf(row) -> str:
        parts = [f"g{k + 1}" if v == 1 else f"g{k + 1}^{v}"
                 for k, v in enumerate(row) if v]
        return "*".join(parts) if parts else "1"

    for i in range(pc.n):
        if pc.power[i] is not None:
            lines.append(f"pow g{i + 1} = {nf(pc.power[i])}")
    for j in range(pc.n):
        for i in range(j):
            if pc.comm[j][i] is not None:
                lines.append(f"comm g{j + 1} g{i + 1} = {nf(pc.comm[j][i])}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# The two presentation families

FAMILIES = ("bifurcation", "metabelian-chain")


def instantiate_family(family: str, e: int) -> PcPresentation:
    """Explicit pc presentation of a family member.

    bifurcation(e), e >= 2: generators x1..xe (x_{k+1} = x_k^3), y, and the
    commutator chain s2=[y,x1], s3=[s2,x1], t3=[s2,y], s4=[s3,x1], t4=[t3,y],
    ordered by weight; n = e + 6. metabelian-chain(e), e >= 6: additionally
    s5=[s4,x1]; n = e + 7. All relations not forced by the definitions or
    listed in the family table are trivial.
    """
    chain = _family_kind(family, e)
    gens: list[tuple] = [("x1", 1, None), ("y", 1, None)]
    top = max(e, 5 if chain else 4)
    for w in range(2, top + 1):
        if w <= e:
            gens.append((f"x{w}", w, ("p", f"x{w - 1}")))
        if w == 2:
            gens.append(("s2", 2, ("c", "y", "x1")))
        elif w == 3:
            gens.append(("s3", 3, ("c", "s2", "x1")))
            gens.append(("t3", 3, ("c", "s2", "y")))
        elif w == 4:
            gens.append(("s4", 4, ("c", "s3", "x1")))
            gens.append(("t4", 4, ("c", "t3", "y")))
        elif w == 5 and chain:
            gens.append(("s5", 5, ("c", "s4", "x1")))

    pow_rel: dict[str, list] = {}
    for k in range(1, e):
        pow_rel[f"x{k}"] = [(f"x{k + 1}", 1)]
    comm_rel: dict[tuple, list] = {
        ("y", "x1"): [("s2", 1)],
        ("s2", "x1"): [("s3", 1)],
        ("s2", "y"): [("t3", 1)],
        ("s3", "x1"): [("s4", 1)],
        ("t3", "y"): [("t4", 1)],
    }
    if chain:
        comm_rel[("s4", "x1")] = [("s5", 1)]
        pow_rel["y"] = [("s3", 1), ("s4", 2)]
        pow_rel["s2"] = [("s4", 1), ("t4", 2)]
        pow_rel["s3"] = [("s5", 1)]
        pow_rel["t3"] = [("s5", 2)]
        comm_rel[("x2", "y")] = [("s4", 1), ("t4", 1), ("s5", 2)]
        comm_rel[("s2", "x2")] = [("s5", 2)]
        comm_rel[("t4", "y")] = [("s5", 1)]
    else:
        pow_rel["y"] = [("s3", 1), ("s4", 2)]
        pow_rel["s2"] = [("s4", 1), ("t4", 2)]
        comm_rel[("x2", "y")] = [("s4", 1), ("t4", 1)]
    return make_pc(3, {"gens": gens, "pow": pow_rel, "comm": comm_rel})


def family_fp(family: str, e: int) -> FpPresentation:
    """Compact two-generator fp presentation of a family member.

    The relator set is the full defining set: the p-quotient of this
    presentation stabilizes at the family group itself.
    """
    chain = _family_kind(family, e)
    head = (
        "gens x, y;\n"
        "abbrev s2=[y,x], s3=[s2,x], t3=[s2,y], s4=[s3,x], t4=[t3,y]"
    )
    if chain:
        head += ", s5=[s4,x], t5=[t4,y];\n"
        rels = (
            f"rel x^{{3^{e}}}, y^3=s3*s4^2, s2^3=s4*t4^2, s3^3=s5, t3^3=s5^2,\n"
            f"    [x^3,y]=s4*t4*s5^2, [x^3,s2]=s5, t5=s5;\n"
        )
    else:
        head += ";\n"
        rels = f"rel x^{{3^{e}}}, y^3=s3*s4^2, s2^3=s4*t4^2, [x^3,y]=s4*t4;\n"
    return parse_fp(head + rels)


def _family_kind(family: str, e: int) -> bool:
    if family == "bifurcation":
        if e < 2:
            raise ValueError("bifurcation needs e >= 2")
        return False
    if family == "metabelian-chain":
        if e < 6:
            raise ValueError("metabelian-chain needs e >= 6")
        return True
    raise ValueError(f"unknown family {family!r}, expected one of {FAMILIES}")
