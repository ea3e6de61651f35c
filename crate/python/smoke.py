"""Smoke test for the Python bindings; run after installing the extension module."""

import json
import pathlib

import descfact

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"


def load(name):
    return descfact.DescriptorSystem.from_json((DATA / name).read_text())


def example1():
    g = load("ex1.json")
    assert (g.order, g.inputs, g.outputs, g.domain) == (5, 2, 2, "continuous")
    report = g.poles(alpha=-1.0)
    assert report["n_bad"] == 3, report

    f = descfact.grcf(g, alpha=-1.0, poles=[-1, -2, -3])
    assert f.assigned_poles == 3
    assert f.minimal_denominator().order == 3
    check = f.check()
    assert check["passed"], check

    s = 0.7 + 1.3j
    n, m = f.numerator()(s), f.denominator()(s)
    # G(s)·M(s) = N(s) entrywise.
    gv = g(s)
    for i in range(2):
        for j in range(2):
            gm = sum(gv[i][k] * m[k][j] for k in range(2))
            assert abs(gm - n[i][j]) < 1e-10 * (1 + abs(n[i][j]))

    left = descfact.glcf(g, alpha=-1.0)
    assert left.minimal_denominator().order == 3
    assert left.check()["passed"]


def example2():
    g = load("ex2.json")
    f = descfact.grcfid(g)
    assert f.minimal_denominator().order == 3
    assert descfact.innerness(f.denominator(), 32) < 1e-8
    assert f.check()["passed"]
    assert descfact.innerness(descfact.glcfid(g).denominator()) < 1e-8


def errors():
    try:
        descfact.grcfid(load("ex_cont_improper.json"))
    except descfact.NoSolutionError:
        pass
    else:
        raise AssertionError("expected NoSolutionError")
    try:
        descfact.DescriptorSystem([[1.0, 2.0]], [[1.0]], [[1.0]])
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")


def round_trip():
    g = descfact.DescriptorSystem(
        [[0.0, 1.0], [-2.0, 0.3]], [[0.0], [1.0]], [[1.0, 0.0]], domain="continuous"
    )
    back = descfact.DescriptorSystem.from_json(g.to_json())
    assert back.a == g.a and back.e == g.e and back.d == [[0.0]]
    assert json.loads(g.to_json())["domain"] == "continuous"


if __name__ == "__main__":
    example1()
    example2()
    errors()
    round_trip()
    print("python smoke test passed")
