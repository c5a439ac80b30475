"""Exact integer Smith normal form and abelian p-group invariants.

The Smith routine works over Python ints with full transform tracking:
smith_normal_form(M) returns (U, D, V) with U @ M @ V == D, U and V
unimodular, and the diagonal entries nonnegative with d1 | d2 | ... .
Matrices here are small (a few dozen rows), so the classical pivoting
algorithm is plenty fast and stays exact.

Abelian invariants of a finite abelian p-group presented as Z^n / rowspace(M)
are reported logarithmically: AbelianType((2, 1)) is the group of type
(p^2, p), printed "21". Symbolic type patterns with an e parameter ("e+21",
"(e-1)22") evaluate to concrete types and support matching.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


def _eye(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _det(m: list[list[int]]) -> int:
    """Exact determinant via fraction-free elimination on a copy."""
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    det = Fraction(1)
    for col in range(n):
        piv = None
        for i in range(col, n):
            if a[i][col]:
                piv = i
                break
        if piv is None:
            return 0
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for i in range(col + 1, n):
            if a[i][col]:
                f = a[i][col] * inv
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    assert det.denominator == 1
    return int(det)


def smith_normal_form(m_rows) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Smith normal form with transforms: returns (U, D, V), U @ M @ V == D.

    M is given as an iterable of int rows (possibly empty). D has the same
    shape as M with nonnegative diagonal entries d1 | d2 | ... and zeros
    elsewhere. U and V are unimodular.
    """
    a = [list(map(int, row)) for row in m_rows]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u = _eye(rows)
    v = _eye(cols)

    def row_op(i, j, f):
        a[i] = [x - f * y for x, y in zip(a[i], a[j])]
        u[i] = [x - f * y for x, y in zip(u[i], u[j])]

    def col_op(i, j, f):
        for r in range(rows):
            a[r][i] -= f * a[r][j]
        for r in range(cols):
            v[r][i] -= f * v[r][j]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in range(rows):
            a[r][i], a[r][j] = a[r][j], a[r][i]
        for r in range(cols):
            v[r][i], v[r][j] = v[r][j], v[r][i]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while t < rows and t < cols:
        # Locate a pivot of minimal absolute value in the trailing block.
        piv = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                x = abs(a[i][j])
                if x and (best is None or x < best):
                    best = x
                    piv = (i, j)
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        if a[t][t] < 0:
            negate_row(t)
        # Chip away at the pivot row and column until everything divides.
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, rows):
                if a[i][t]:
                    f = a[i][t] // a[t][t]
                    row_op(i, t, f)
                    if a[i][t]:
                        swap_rows(t, i)
                        if a[t][t] < 0:
                            negate_row(t)
                        dirty = True
            for j in range(t + 1, cols):
                if a[t][j]:
                    f = a[t][j] // a[t][t]
                    col_op(j, t, f)
                    if a[t][j]:
                        swap_cols(t, j)
                        dirty = True
        # Pivot must divide the whole trailing block; if not, fold the
        # offending row in and restart the chipping.
        ok = True
        d = a[t][t]
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if a[i][j] % d:
                    row_op(t, i, -1)
                    ok = False
                    break
            if not ok:
                break
        if ok:
            t += 1
    return u, a, v


def snf_verify(m_rows, u, d, v) -> None:
    """Assert the Smith postconditions for (U, D, V) against M."""
    m = [list(map(int, row)) for row in m_rows]
    rows, cols = len(d), (len(d[0]) if d else 0)
    assert len(u) == rows and len(v) == cols
    # U @ M @ V == D
    um = [[sum(u[i][k] * m[k][j] for k in range(rows)) for j in range(cols)]
          for i in range(rows)]
    umv = [[sum(um[i][k] * v[k][j] for k in range(cols)) for j in range(cols)]
           for i in range(rows)]
    assert umv == d, "transform product mismatch"
    diag = [d[i][i] for i in range(min(rows, cols))]
    for i in range(rows):
        for j in range(cols):
            if i != j:
                assert d[i][j] == 0, "off diagonal junk"
    for i in range(len(diag) - 1):
        assert diag[i] >= 0
        if diag[i] == 0:
            assert diag[i + 1] == 0, "zero pivot before nonzero"
        else:
            assert diag[i + 1] % diag[i] == 0, "divisibility chain"
    assert abs(_det(u)) == 1, "U not unimodular"
    assert abs(_det(v)) == 1, "V not unimodular"


def smith_normal_form_checked(m_rows):
    u, d, v = smith_normal_form(m_rows)
    snf_verify(m_rows, u, d, v)
    return u, d, v


@dataclass(frozen=True, order=True)
class AbelianType:
    """Logarithmic type of a finite abelian p-group: nonincreasing exponent logs.

    AbelianType((2, 1)) with p = 3 is C_9 x C_3, rendered "21". The trivial
    group is AbelianType(()) and renders "0". Logs above 9 render
    parenthesized, e.g. "(10)21".
    """

    logs: tuple[int, ...]

    def __post_init__(self):
        assert all(isinstance(x, int) and x > 0 for x in self.logs)
        assert tuple(sorted(self.logs, reverse=True)) == self.logs, "logs must be nonincreasing"

    @staticmethod
    def of(*logs: int) -> "AbelianType":
        return AbelianType(tuple(sorted((x for x in logs if x), reverse=True)))

    @property
    def rank(self) -> int:
        return len(self.logs)

    @property
    def order_exp(self) -> int:
        return sum(self.logs)

    def render(self) -> str:
        if not self.logs:
            return "0"
        return "".join(str(x) if x <= 9 else f"({x})" for x in self.logs)

    def __str__(self) -> str:
        return self.render()


def abelian_type_from_matrix(m_rows, p: int, n_cols: int | None = None) -> AbelianType:
    """Type of Z^n / rowspace(M) for a finite abelian p-group.

    Raises if the quotient is infinite or has order not a power of p.
    """
    m = [list(map(int, row)) for row in m_rows]
    if not m:
        if n_cols in (None, 0):
            return AbelianType(())
        raise ValueError("no relations: quotient is infinite")
    cols = len(m[0])
    if n_cols is not None:
        assert cols == n_cols
    _, d, _ = smith_normal_form(m)
    diag = [d[i][i] for i in range(min(len(d), cols))]
    if len(diag) < cols or any(x == 0 for x in diag):
        raise ValueError("quotient is infinite")
    logs = []
    for x in diag:
        if x == 1:
            continue
        e = 0
        while x % p == 0:
            x //= p
            e += 1
        if x != 1:
            raise ValueError(f"quotient order not a power of {p}")
        logs.append(e)
    return AbelianType(tuple(sorted(logs, reverse=True)))


def cyclic_decomposition(m_rows, p: int):
    """Cyclic coordinates for A = Z^n / rowspace(M), a finite abelian p-group.

    Returns (moduli, to_coords) where moduli lists the cyclic orders > 1 in
    nonincreasing order and to_coords maps an integer exponent row of length n
    to its coordinates, one per modulus. Two rows map to equal coordinates
    exactly when they agree in A.
    """
    m = [list(map(int, row)) for row in m_rows]
    if not m:
        raise ValueError("no relations")
    cols = len(m[0])
    u, d, v = smith_normal_form(m)
    diag = [d[i][i] for i in range(min(len(d), cols))]
    if len(diag) < cols or any(x == 0 for x in diag):
        raise ValueError("quotient is infinite")
    keep = [(j, diag[j]) for j in range(cols) if diag[j] != 1]
    keep.sort(key=lambda t: -t[1])
    moduli = [md for _, md in keep]

    def to_coords(row):
        assert len(row) == cols
        y = [sum(int(row[i]) * v[i][j] for i in range(cols)) for j in range(cols)]
        return tuple(y[j] % md for j, md in keep)

    return moduli, to_coords


def generator_rows(m_rows, p: int):
    """Integer rows of Z^n mapping to the cyclic generators of Z^n/rowspace(M).

    Row k maps to the generator of the k-th cyclic factor reported by
    cyclic_decomposition (same order, same indexing).
    """
    m = [list(map(int, row)) for row in m_rows]
    cols = len(m[0])
    u, d, v = smith_normal_form(m)
    diag = [d[i][i] for i in range(min(len(d), cols))]
    keep = [(j, diag[j]) for j in range(cols) if diag[j] != 1]
    keep.sort(key=lambda t: -t[1])
    # Coordinates were y = row @ V, so the generator with y = e_j is the row
    # e_j @ V^{-1}. Invert V exactly.
    vinv = _int_inverse(v)
    return [list(vinv[j]) for j, _ in keep]


def _int_inverse(v: list[list[int]]) -> list[list[int]]:
    """Exact inverse of a unimodular integer matrix."""
    n = len(v)
    a = [[Fraction(x) for x in row] + [Fraction(1 if i == j else 0) for j in range(n)]
         for i, row in enumerate(v)]
    for col in range(n):
        piv = next(i for i in range(col, n) if a[i][col])
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for i in range(n):
            if i != col and a[i][col]:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    out = []
    for i in range(n):
        row = a[i][n:]
        assert all(x.denominator == 1 for x in row)
        out.append([int(x) for x in row])
    return out


# ---------------------------------------------------------------------------
# Symbolic type patterns


@dataclass(frozen=True)
class TypePattern:
    """A type whose entries may depend on a parameter e.

    Entries are ints (literal logs) or ('e', delta) meaning e + delta.
    Parsed from strings like "e+21" ([e+1, 2, 1]), "e11", "(e-1)22",
    "(e+1)2111", "(10)21". A leading bare "e" token means delta 0.
    """

    entries: tuple

    @staticmethod
    def parse(s: str) -> "TypePattern":
        out = []
        i = 0
        while i < len(s):
            ch = s[i]
            if ch == "(":
                j = s.index(")", i)
                inner = s[i + 1:j]
                out.append(_parse_entry(inner))
                i = j + 1
            elif ch == "e":
                delta = 0
                j = i + 1
                if j < len(s) and s[j] in "+-":
                    delta = 1 if s[j] == "+" else -1
                    j += 1
                out.append(("e", delta))
                i = j
            elif ch.isdigit():
                out.append(int(ch))
                i += 1
            else:
                raise ValueError(f"bad pattern {s!r} at {i}")
        return TypePattern(tuple(out))

    def evaluate(self, e: int) -> AbelianType:
        vals = []
        for entry in self.entries:
            if isinstance(entry, int):
                vals.append(entry)
            else:
                _, delta = entry
                vals.append(e + delta)
        assert all(v > 0 for v in vals)
        return AbelianType(tuple(sorted(vals, reverse=True)))

    def matches(self, t: AbelianType, e: int) -> bool:
        return self.evaluate(e) == t


def _parse_entry(inner: str):
    if inner.isdigit():
        return int(inner)
    assert inner[0] == "e"
    if len(inner) == 1:
        return ("e", 0)
    sign = {"+": 1, "-": -1}[inner[1]]
    mag = int(inner[2:]) if len(inner) > 2 else 1
    return ("e", sign * mag)


def pattern(s: str) -> TypePattern:
    return TypePattern.parse(s)
