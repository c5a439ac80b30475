"""Collection from the left for pc presentations.

Group elements are normal forms g1^a1 * ... * gn^an represented as exponent
tuples with entries in 0..p-1. The collector maintains a collected prefix and
a stack of uncollected syllables (top of stack is the next letter). Popping a
syllable g_i^e either merges it into the prefix, rewriting a p-overflow
through the power relation, or, when some later generator g_m is already
collected, moves one copy of g_i leftward past g_m at the cost of the
commutator word [g_m, g_i].

Exponent bookkeeping assumes syllables carry exponents in 1..p-1, which every
internal caller preserves; external entry points normalize first. With p = 3
the collector is comfortably fast in pure Python at the sizes that arise
here (a few hundred generators at the very worst).
"""

from __future__ import annotations

import itertools

from .errors import ConsistencyError
from .presentations import PcPresentation

Element = tuple


def identity(pc: PcPresentation) -> Element:
    return (0,) * pc.n


def generator(pc: PcPresentation, i: int) -> Element:
    return tuple(1 if k == i else 0 for k in range(pc.n))


def _push_row(stack: list, row, n: int) -> None:
    for k in range(n - 1, -1, -1):
        v = row[k]
        if v:
            stack.append((k, v))


def _collect(pc: PcPresentation, a: list, stack: list) -> None:
    p = pc.p
    n = pc.n
    power = pc.power
    comm = pc.comm
    while stack:
        i, e = stack.pop()
        m = -1
        for k in range(n - 1, i, -1):
            if a[k]:
                m = k
                break
        if m < 0:
            t = a[i] + e
            if t < p:
                a[i] = t
            else:
                a[i] = t - p
                rhs = power[i]
                if rhs is not None:
                    _push_row(stack, rhs, n)
        else:
            # prefix ends in g_m; move one g_i past it:
            # g_m g_i^e -> g_i g_m [g_m, g_i] g_i^(e-1)
            a[m] -= 1
            if e > 1:
                stack.append((i, e - 1))
            c = comm[m][i]
            if c is not None:
                _push_row(stack, c, n)
            stack.append((m, 1))
            stack.append((i, 1))


def mul(pc: PcPresentation, a: Element, b: Element) -> Element:
    out = list(a)
    stack: list = []
    _push_row(stack, b, pc.n)
    _collect(pc, out, stack)
    return tuple(out)


def _mul_syllable(pc: PcPresentation, a: Element, i: int, e: int) -> Element:
    out = list(a)
    _collect(pc, out, [(i, e)])
    return tuple(out)


def inv(pc: PcPresentation, a: Element) -> Element:
    """Inverse by coordinate correction.

    Multiplying a * g_i^k on the right adds k to coordinate i once all
    earlier coordinates are zero (the section G_i -> G_i/G_{i+1} is a
    homomorphism), so sweeping i = 1..n clears the product one coordinate at
    a time. Results are cached per presentation.
    """
    cache = pc._cache.setdefault("inv", {})
    hit = cache.get(a)
    if hit is not None:
        return hit
    p = pc.p
    c = a
    x = identity(pc)
    for i in range(pc.n):
        k = (-c[i]) % p
        if k:
            c = _mul_syllable(pc, c, i, k)
            x = _mul_syllable(pc, x, i, k)
    cache[a] = x
    cache[x] = a
    return x


def elem_pow(pc: PcPresentation, a: Element, k: int) -> Element:
    if k < 0:
        a = inv(pc, a)
        k = -k
    out = identity(pc)
    base = a
    while k:
        if k & 1:
            out = mul(pc, out, base)
        base_needed = k >> 1
        if base_needed:
            base = mul(pc, base, base)
        k = base_needed
    return out


def comm(pc: PcPresentation, a: Element, b: Element) -> Element:
    """[a, b] = a^-1 b^-1 a b."""
    return mul(pc, inv(pc, a), mul(pc, inv(pc, b), mul(pc, a, b)))


def conjugate(pc: PcPresentation, a: Element, b: Element) -> Element:
    """a^b = b^-1 a b."""
    return mul(pc, inv(pc, b), mul(pc, a, b))


def from_exponents(pc: PcPresentation, exps) -> Element:
    """Normalize an arbitrary integer exponent sequence into a normal form."""
    out = identity(pc)
    for i, v in enumerate(exps):
        v = int(v)
        if v % pc.p == 0 and abs(v) < pc.p:
            continue
        out = mul(pc, out, elem_pow(pc, generator(pc, i), v))
    return out


def evaluate_word(pc: PcPresentation, word, images: dict) -> Element:
    """Evaluate a free Word under a name -> element assignment."""
    out = identity(pc)
    for name, exp in word.factors:
        out = mul(pc, out, elem_pow(pc, images[name], exp))
    return out


def apply_images(pc: PcPresentation, images, vec) -> Element:
    """Image of the normal form vec under g_k -> images[k] (elements of pc)."""
    out = identity(pc)
    for k, v in enumerate(vec):
        if v:
            out = mul(pc, out, elem_pow(pc, images[k], v))
    return out


def element_order(pc: PcPresentation, a: Element) -> int:
    order = 1
    b = a
    while any(b):
        b = elem_pow(pc, b, pc.p)
        order *= pc.p
    return order


def all_elements(pc: PcPresentation):
    """Iterate every normal form (use only for small groups)."""
    return itertools.product(range(pc.p), repeat=pc.n)


# ---------------------------------------------------------------------------
# Consistency


def check_consistency(
    pc: PcPresentation,
    weight_bound: int | None = None,
    top: int | None = None,
) -> list:
    """Evaluate the overlap conditions; return a list of violations.

    Checks, for all applicable index combinations:
      assoc:    g_k (g_j g_i) == (g_k g_j) g_i          for k > j > i
      pow_jp_i: (g_j^p) g_i   == g_j^(p-1) (g_j g_i)    for j > i
      pow_j_ip: g_j (g_i^p)   == (g_j g_i) g_i^(p-1)    for j > i
      pow_ii:   (g_i^p) g_i   == g_i (g_i^p)            for all i

    weight_bound skips combinations whose total weight exceeds the bound
    (sound for presentations whose weights are honest); None checks all.
    top restricts the indices to the first `top` generators, for callers
    that know the remaining generators cannot produce new conditions.
    Violations are (kind, indices, lhs, rhs) tuples.
    """
    n = pc.n if top is None else top
    p = pc.p
    w = pc.weights
    gens = [generator(pc, i) for i in range(n)]
    cubes = [elem_pow(pc, g, p) for g in gens]
    bad = []

    def within(total: int) -> bool:
        return weight_bound is None or total <= weight_bound

    for k in range(n):
        for j in range(k):
            for i in range(j):
                if not within(w[k] + w[j] + w[i]):
                    continue
                lhs = mul(pc, gens[k], mul(pc, gens[j], gens[i]))
                rhs = mul(pc, mul(pc, gens[k], gens[j]), gens[i])
                if lhs != rhs:
                    bad.append(("assoc", (k, j, i), lhs, rhs))
    for j in range(n):
        for i in range(j):
            if within(w[j] + 1 + w[i]):
                lhs = mul(pc, cubes[j], gens[i])
                rhs = mul(pc, elem_pow(pc, gens[j], p - 1), mul(pc, gens[j], gens[i]))
                if lhs != rhs:
                    bad.append(("pow_jp_i", (j, i), lhs, rhs))
            if within(w[j] + w[i] + 1):
                lhs = mul(pc, gens[j], cubes[i])
                rhs = mul(pc, mul(pc, gens[j], gens[i]), elem_pow(pc, gens[i], p - 1))
                if lhs != rhs:
                    bad.append(("pow_j_ip", (j, i), lhs, rhs))
    for i in range(n):
        if not within(2 * w[i] + 1):
            continue
        lhs = mul(pc, cubes[i], gens[i])
        rhs = mul(pc, gens[i], cubes[i])
        if lhs != rhs:
            bad.append(("pow_ii", (i,), lhs, rhs))
    return bad


def is_consistent(pc: PcPresentation, weight_bound: int | None = None) -> bool:
    return not check_consistency(pc, weight_bound)


def assert_consistent(pc: PcPresentation) -> None:
    bad = check_consistency(pc)
    if bad:
        raise ConsistencyError(f"{len(bad)} overlap violations", bad)
