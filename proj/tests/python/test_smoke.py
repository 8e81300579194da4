import pytest

import fpiua


@pytest.fixture(scope="module")
def f():
    return fpiua.Format(5, 3)


def test_format(f):
    assert f.name == "E5M3"
    assert f.emin == -14 and f.emax == 15
    assert f.finite_count == 495
    assert fpiua.to_float(f, f.largest) == 61440.0
    assert f.smallest == "+:-14:1"
    assert fpiua.Format.parse("E8M7").M == 7


def test_rounding_and_arith(f):
    one = fpiua.round(f, 1)
    assert one == "+:0:8"
    assert fpiua.to_float(f, fpiua.round(f, 1.0625)) == 1.0  # tie to even
    assert fpiua.to_float(f, fpiua.add(f, 1, 0.0625)) == 1.0
    assert fpiua.to_float(f, fpiua.mul(f, 40000, 2)) == float("inf")
    xs = fpiua.floats(f, -1, 1)
    assert len(xs) == 241
    assert [fpiua.to_float(f, x) for x in xs] == sorted(fpiua.to_float(f, x) for x in xs)


def test_activations(f):
    assert "relu" in fpiua.activation_names()
    assert fpiua.to_float(f, fpiua.activation(f, "relu", -3)) == 0.0
    r = fpiua.check_condition(f, "relu")
    assert r["ok"] and r["failed"] == ""
    assert {"c1", "c2", "K", "eta", "eta_plus"} <= set(r)


def test_min_network_interval(f):
    n = fpiua.relu_min_network(f)
    assert n.depth == 2 and n.in_dim == 2
    assert fpiua.to_float(f, n.eval([2, 3])[0]) == 2.0
    (lo, hi), = n.eval_interval([(1, 2), (3, 4)])
    assert fpiua.to_float(f, lo) <= 1.0 and fpiua.to_float(f, hi) >= 2.0
    text = n.to_text()
    assert fpiua.Network.from_text(text).to_text() == text


def test_synthesize_iua_exact(f):
    t = fpiua.Table.random(f, 1, 1, 4, seed=7)
    n = fpiua.synthesize_iua("relu", t)
    rep = fpiua.check_iua(n, t)
    assert rep["ok"], rep["text"]
    assert rep["checked"] == len(t.grid()) * (len(t.grid()) + 1) // 2
    assert fpiua.check_pointwise(n, t)["ok"]
    b = [("+:0:8", "+:1:12")]
    assert n.eval_interval(b)[0] == t.image(b)


def test_synthesize_iua_from_function(f):
    t = fpiua.Table.from_function(f, 1, -2, 2, lambda x: 1 if fpiua.to_float(f, x[0]) >= 0 else -1)
    n = fpiua.synthesize_iua("sigmoid", t)
    assert fpiua.check_iua(n, t, samples=300, seed=1)["ok"]


def test_check_iua_detects_wrong_target(f):
    t = fpiua.Table.random(f, 1, 1, 4, seed=7)
    other = fpiua.Table.random(f, 1, 1, 4, seed=8)
    n = fpiua.synthesize_iua("relu", t)
    rep = fpiua.check_iua(n, other)
    assert not rep["ok"] and rep["text"].startswith("FAIL box=")


def test_program_roundtrip(f):
    n = fpiua.random_network(f, "identity", 2, 3, 4, seed=3)
    p = fpiua.compile_to_program(n)
    assert p.arity == 2
    for x in ([2, 3], [5, -1], [0.5, 0.125]):
        assert p.run(x) == n.eval(x)
    assert fpiua.Program.from_text(p.to_text()).run([5, -1]) == p.run([5, -1])


def test_synthesize_program(f):
    t = fpiua.Table.random(f, 1, "-" + f.largest[1:], f.largest, seed=5)
    p = fpiua.synthesize_program(t)
    assert p.size > 0
    rep = fpiua.check_program(p, t, samples=200, seed=2)
    assert rep["ok"], rep["text"]


def test_robust(f):
    grid = fpiua.floats(f, -1, 1)
    pos = fpiua.Table.from_function(f, 1, -1, 1, lambda x: 1 if fpiua.to_float(f, x[0]) >= 0.5 else 0)
    neg = fpiua.Table.from_function(f, 1, -1, 1, lambda x: 0 if fpiua.to_float(f, x[0]) >= 0.5 else 1)
    c = fpiua.Classifier([neg, pos], 0.0625, [[-0.5], [0.875]])
    assert c.n_classes == 2 and c.is_robust()
    assert c.classify([0.875]) == 1 and c.classify([-0.5]) == 0
    n = fpiua.synthesize_robust(c, "relu")
    assert fpiua.is_provably_robust(n, c)
    for x in grid[::17]:
        assert fpiua.classify(n, [x]) == c.classify([x])
    c2 = fpiua.Classifier.from_text(c.to_text())
    assert c2.to_text() == c.to_text()


def test_errors(f):
    with pytest.raises(ValueError):
        fpiua.Format.parse("nonsense")
    with pytest.raises(ValueError):
        fpiua.Network.from_text("garbage")
