"""Smoke test for the Python bindings.

Build and install first:

    pip install --no-build-isolation ./crates/pnilrep-py
"""

import cmath
import json

import pnilrep


def test_heisenberg_dual_counts():
    labels = pnilrep.dual("h1", 3, 1)
    assert len(labels) == 11
    assert sum(d * d for _, d in labels) == 27
    assert pnilrep.peter_weyl("g52", 3, 1) == (243, 243)


def test_rep_matrix_is_unitary_and_central_phase():
    m = pnilrep.rep_matrix("h1", 3, "1,1,1/3", [0, 0, 1])
    assert len(m) == 3
    for r in range(3):
        for c in range(3):
            expected = cmath.exp(2j * cmath.pi / 3) if r == c else 0
            assert abs(m[r][c] - expected) < 1e-12
    assert abs(pnilrep.character("h1", 3, "1,1,1/3", [1, 0, 0])) < 1e-12


def test_gaussian_fixed_case():
    assert abs(pnilrep.gaussian(5, "1/25", "0", 0) - 0.2) < 1e-12


def test_cli_passthrough():
    code, out, err = pnilrep.run(["dual", "--group", "b4", "--prime", "3", "--level", "1"])
    assert code == 0, err
    doc = json.loads(out)
    assert doc["pass"] is True
    code, _, err = pnilrep.run(["dual", "--group", "g54", "--prime", "3", "--level", "1"])
    assert code == 2 and err


def test_bad_input_raises():
    try:
        pnilrep.rep_matrix("h1", 3, "1/3,1,1/3", [0, 0, 0])
    except ValueError:
        return
    raise AssertionError("non-canonical label accepted")


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            fn()
    print("ok")
