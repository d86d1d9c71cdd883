import jsonschema
import numpy as np
import pytest

import pypia


def test_examples_listed():
    names = pypia.example_names()
    for n in ("fulling-pos", "fulling-neg", "nonhermitian", "bec-vortex", "scalar-quadratic"):
        assert n in names
    spec = pypia.example("fulling-pos")
    assert spec["R"][0][0] == "x*cos(x)^2 + sin(x)^2"


def test_problem_matrices():
    p = pypia.Problem.from_example("fulling-pos")
    assert p.n == 2
    G = p.G(0.3)
    assert G.shape == (2, 2)
    assert np.allclose(G, G.T)


def test_engine_closed_form():
    p = pypia.Problem.from_example("fulling-pos")
    e = pypia.Engine(p, theory="fulling", branch="0", order=2, anchor=2.0)
    for x in (2.5, 3.0, 7.0):
        r = e.at(x)
        assert abs(r["Q2"] - 1) < 1e-12
        assert abs(r["Y"][0] - 1) < 1e-12
        assert abs(r["Y"][2] - (-0.5 + 2 / (x - 1))) < 1e-12
        assert abs(r["c_perp"][1] + 2j / (x - 1)) < 1e-12


def test_scalar_corrections_power_law():
    # Q^2 = x: Y_2 = 5/(32 x^3)
    Y = pypia.scalar_corrections("x", 2.0, 2)
    assert Y[0] == 1
    assert abs(Y[1] - 5 / (32 * 8)) < 1e-15


def test_wave_conjugate_pair():
    p = pypia.Problem.from_example("fulling-pos")
    e = pypia.Engine(p, branch="1", order=2, anchor=3.0)
    grid = [3.0, 3.5, 4.0]
    plus = e.wave(1, grid, 0.5)
    minus = e.wave(-1, grid, 0.5)
    for up, um in zip(plus["u"], minus["u"]):
        assert np.allclose(np.conj(up), um, atol=1e-14)


def test_expressions():
    assert pypia.evaluate("sin(x)^2 + cos(x)^2", 0.7) == pytest.approx(1.0)
    assert pypia.evaluate(pypia.differentiate("x^3"), 2.0) == pytest.approx(12.0)
    assert pypia.evaluate("k*x", 2.0, {"k": 3}) == pytest.approx(6.0)


def test_error_kind():
    with pytest.raises(pypia.PiaError) as info:
        pypia.Problem.from_example("nope")
    assert info.value.args[1] == "UnknownExample"
    with pytest.raises(pypia.PiaError) as info:
        pypia.Engine(pypia.Problem.from_example("fulling-pos"), anchor=1.0).at(1.0)
    assert info.value.args[1] == "CrossingPoint"


@pytest.mark.parametrize(
    "check,opts",
    [
        ("crossings", {}),
        ("current", {"theory": "fulling", "order": "2", "lambda": "0.1"}),
        ("residual", {"order": "2", "lambda": "0.1"}),
        ("order-scaling", {"order": "2"}),
    ],
)
def test_verify_report_schema(check, opts):
    example = "scalar-quadratic" if check == "order-scaling" else "fulling-pos"
    code, report = pypia.verify(check, example=example, **opts)
    jsonschema.validate(report, pypia.verify_schema())
    assert report["check"] == check
    assert (code == 0) == report["pass"]


def test_cli_in_process():
    code, out, err = pypia.run_cli(["corrections", "--example", "fulling-pos", "--at", "3"])
    assert code == 0 and err == ""
    header = out.splitlines()[0].split(",")
    assert header[0] == "x"
    code, _, err = pypia.run_cli(["example", "nope"])
    assert code == 2 and "UnknownExample" in err
