"""Shared small-group constructors for the test suite."""

from sigma3.presentations import make_pc


def heisenberg():
    # extraspecial 27: z = [y, x] central, everything of exponent 3
    return make_pc(3, {
        "gens": [("x", 1, None), ("y", 1, None), ("z", 2, ("c", "y", "x"))],
        "pow": {},
        "comm": {("y", "x"): [("z", 1)]},
    })


def abelian_93():
    return make_pc(3, {
        "gens": [("x", 1, None), ("y", 1, None), ("x2", 2, ("p", "x"))],
        "pow": {"x": [("x2", 1)]},
        "comm": {},
    })


def elementary(d):
    return make_pc(3, {
        "gens": [(f"a{i + 1}", 1, None) for i in range(d)],
        "pow": {},
        "comm": {},
    })
