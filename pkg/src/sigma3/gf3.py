"""Dense linear algebra over GF(3).

Vectors are rows. Matrices act on the right, so the image of a row vector v
under A is v @ A and subspaces are row spaces. Everything is small (dimensions
rarely exceed a few dozen), so the arithmetic sticks to numpy int8 arrays
reduced mod 3 after every operation.
"""

from __future__ import annotations

import itertools

import numpy as np

P = 3


def mat(rows, cols: int | None = None) -> np.ndarray:
    """Build an int8 matrix mod 3 from an iterable of rows."""
    rows = list(rows)
    if not rows:
        return np.zeros((0, 0 if cols is None else cols), dtype=np.int8)
    a = np.array(rows, dtype=np.int64) % P
    return a.astype(np.int8)


def rref(a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form. Returns (R, pivot_columns).

    Pivot of each row is the first nonzero entry, scaled to 1; zero rows are
    dropped. Deterministic: rows are processed top down, pivots left to right.
    """
    r = a.astype(np.int16) % P
    m, n = r.shape
    pivots: list[int] = []
    row = 0
    for col in range(n):
        sel = None
        for i in range(row, m):
            if r[i, col] % P:
                sel = i
                break
        if sel is None:
            continue
        if sel != row:
            r[[row, sel]] = r[[sel, row]]
        inv = 1 if r[row, col] % P == 1 else 2
        r[row] = (r[row] * inv) % P
        for i in range(m):
            if i != row and r[i, col] % P:
                r[i] = (r[i] - r[i, col] * r[row]) % P
        pivots.append(col)
        row += 1
        if row == m:
            break
    return r[: len(pivots)].astype(np.int8), pivots


def rank(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    return len(rref(a)[1])


def nullspace(a: np.ndarray) -> np.ndarray:
    """Row basis of {v : v @ a == 0}, in RREF."""
    m, n = a.shape
    if m == 0:
        return np.eye(0, dtype=np.int8)
    # Solve v @ a == 0 by reducing a^T: kernel of a^T acting on columns.
    r, piv = rref(a.T.copy())
    free = [j for j in range(m) if j not in piv]
    basis = np.zeros((len(free), m), dtype=np.int8)
    for k, j in enumerate(free):
        basis[k, j] = 1
        for i, c in enumerate(piv):
            basis[k, c] = (-int(r[i, j])) % P
    return subspace_canon_rows(basis)


def solve(a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """One solution x of x @ a == b over GF(3), or None if inconsistent.

    b may be a single row or a stack of rows (one solution per row).
    """
    single = b.ndim == 1
    b = np.atleast_2d(b)
    m, n = a.shape
    if b.shape[1] != n:
        raise ValueError("shape mismatch")
    if m == 0:
        return (np.zeros(0, dtype=np.int8) if single
                else np.zeros((b.shape[0], 0), dtype=np.int8))
    # Row reduce [a | I] so every surviving row carries its recipe in terms
    # of the original rows of a; reducing b by the left blocks accumulates a
    # solution from the right blocks.
    t = np.hstack([a % P, np.eye(m, dtype=np.int8)])
    rt, pivt = rref(t)
    sol = np.zeros((b.shape[0], m), dtype=np.int16)
    res = b.astype(np.int16) % P
    for i, c in enumerate(pivt):
        if c >= n:
            break
        coef = res[:, c] % P
        res = (res - np.outer(coef, rt[i][:n])) % P
        sol = (sol + np.outer(coef, rt[i][n:])) % P
    if res.any():
        return None
    out = (sol % P).astype(np.int8)
    return out[0] if single else out


def subspace_canon_rows(rows: np.ndarray) -> np.ndarray:
    """Canonical (RREF, zero rows dropped) basis array for a row space."""
    if rows.size == 0:
        return rows.reshape(0, rows.shape[1] if rows.ndim == 2 else 0).astype(np.int8)
    r, _ = rref(rows)
    return r


def subspace_key(rows: np.ndarray, width: int) -> tuple[tuple[int, ...], ...]:
    """Hashable canonical form of a row space inside GF(3)^width."""
    if rows.size == 0:
        return ()
    r = subspace_canon_rows(rows.reshape(-1, width))
    return tuple(tuple(int(x) for x in row) for row in r)


def key_to_rows(key, width: int) -> np.ndarray:
    if not key:
        return np.zeros((0, width), dtype=np.int8)
    return np.array(key, dtype=np.int8)


def subspaces(n: int, k: int):
    """Iterate canonical RREF bases of all k-dimensional subspaces of GF(3)^n.

    Enumeration runs over pivot column patterns (Schubert cells) with free
    entries filled from itertools.product, so memory stays O(k*n) per yield
    and the order is deterministic.
    """
    if k == 0:
        yield ()
        return
    for pivots in itertools.combinations(range(n), k):
        free_pos = []
        for i in range(k):
            for j in range(pivots[i] + 1, n):
                if j not in pivots:
                    free_pos.append((i, j))
        for vals in itertools.product(range(P), repeat=len(free_pos)):
            base = [[0] * n for _ in range(k)]
            for i in range(k):
                base[i][pivots[i]] = 1
            for (i, j), v in zip(free_pos, vals):
                base[i][j] = v
            yield tuple(tuple(row) for row in base)


def gaussian_binomial(n: int, k: int, q: int = P) -> int:
    """Number of k-dimensional subspaces of GF(q)^n."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    assert num % den == 0
    return num // den
