"""Regenerate the H_1 golden matrices at p = 3, level 1 from the monomial
formula pi(x)[a][a + x1] = e(xi1 x1 + xi2 x2 + xi3 (x3 + a x2)), using exact
fractions. Writes crates/pnilrep/tests/golden/h1_p3_n1_matrices.json.
"""

import cmath
import itertools
import json
from fractions import Fraction
from pathlib import Path

P = 3


def label_str(q):
    return "1" if q == 0 else f"{q.numerator}/{q.denominator}"


def labels():
    out = []
    for c3 in range(P):
        xi3 = Fraction(c3, P)
        if c3 == 0:
            for c1, c2 in itertools.product(range(P), repeat=2):
                out.append((Fraction(c1, P), Fraction(c2, P), xi3))
        else:
            out.append((Fraction(0), Fraction(0), xi3))
    return out


def matrix(xi, x):
    xi1, xi2, xi3 = xi
    d = 1 if xi3 == 0 else P
    m = [[[0.0, 0.0] for _ in range(d)] for _ in range(d)]
    for a in range(d):
        phase = (xi1 * x[0] + xi2 * x[1] + xi3 * (x[2] + a * x[1])) % 1
        z = cmath.exp(2j * cmath.pi * float(phase))
        m[a][(a + x[0]) % d] = [round(z.real, 15), round(z.imag, 15)]
    return m


def main():
    cases = []
    for xi in labels():
        for x in itertools.product(range(P), repeat=3):
            cases.append({"xi": [label_str(q) for q in xi], "x": list(x), "entries": matrix(xi, x)})
    path = Path(__file__).resolve().parent.parent / "crates/pnilrep/tests/golden/h1_p3_n1_matrices.json"
    path.write_text(json.dumps(cases, separators=(",", ":")) + "\n")
    print(f"{len(cases)} matrices -> {path}")


if __name__ == "__main__":
    main()
