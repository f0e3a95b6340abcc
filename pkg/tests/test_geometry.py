from fractions import Fraction as F

import pytest

from hamon.geometry import DimensionError, IntervalUpdate, LinearConstraint, Polyhedron, VarSpace, merge_if_convex
from hamon.geometry.polyhedron import covers, union_equals
from hamon.model import poly

X1 = VarSpace(["x1"])
X = VarSpace(["x1", "x2"])
D = X.derivatives()


def test_universe_and_point():
    assert Polyhedron.from_constraints(X, []).is_universe()
    P = poly(X, ["x1 = 40", "x2 = 35"])
    assert P.vertices() == [(40, 35)]
    assert not P.is_empty()


def test_contradiction_is_empty():
    assert poly(X1, ["x1 >= 1", "x1 <= 0"]).is_empty()


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        Polyhedron.from_constraints(X, [LinearConstraint((F(1),), "<=", F(0))])
    with pytest.raises(DimensionError):
        poly(X, "x1 <= 1").intersect(poly(X1, "x1 <= 1"))


def test_intersect_examples():
    box = poly(X, ["115 <= x1 <= 125", "115 <= x2 <= 125"])
    pt = poly(X, ["x1 = 123", "x2 = 117"])
    assert box.intersect(pt).equals(pt)
    assert box.intersect(Polyhedron.universe(X)).equals(box)
    assert box.intersect(Polyhedron.empty(X)).is_empty()
    assert not box.intersect(pt).is_empty()


def test_elapse_zero_flow():
    P = poly(X, ["0 <= x1 <= 1", "x2 = 3"])
    assert P.time_elapse(poly(D, ["x1' = 0", "x2' = 0"])).equals(P)


def test_elapse_exact_box():
    start = poly(X, ["x1 = 40", "x2 = 35"])
    flow = poly(D, ["7.5 <= x1' <= 8.5", "8 <= x2' <= 9"])
    box = poly(X, ["115 <= x1 <= 125", "115 <= x2 <= 125"])
    assert start.time_elapse(flow, 10).equals(box)


def test_elapse_ray():
    got = poly(X, ["x1 = 0", "x2 = 0"]).time_elapse(poly(D, ["x1' = 1", "x2' = 2"]))
    assert got.equals(poly(X, ["x2 = 2*x1", "x1 >= 0"]))


def test_elapse_with_clock_bound():
    T = VarSpace(["x", "t"])
    flow = poly(T.derivatives(), ["1 <= x' <= 2", "t' = 1"])
    got = poly(T, ["x = 0", "t = 0"]).time_elapse(flow, 3, "t")
    assert got.equals(poly(T, ["t <= x", "x <= 2*t", "t <= 3"]))
    with pytest.raises(ValueError):
        poly(T, ["x = 0"]).time_elapse(poly(T.derivatives(), ["t' = 2"]), 1, "t")


def test_elapse_zero_duration():
    P = poly(X, ["x1 = 1", "x2 = 2"])
    assert P.time_elapse(poly(D, ["x1' = 5"]), 0).equals(P)


def test_elapse_rejects_empty_flow():
    with pytest.raises(ValueError):
        poly(X, "x1 = 0").time_elapse(Polyhedron.empty(D))


def test_eliminate():
    P = poly(X, ["x1 = 3", "x2 = 5"])
    assert P.eliminate(["x2"]).equals(poly(X1, "x1 = 3"))
    Q = poly(X, ["x2 = 2*x1", "0 <= x1 <= 1"])
    assert Q.eliminate(["x1"]).equals(poly(VarSpace(["x2"]), "0 <= x2 <= 2"))
    assert Q.eliminate([]) is Q


def test_apply_update():
    P = poly(X, ["x1 = 5", "x2 = 7"])
    assert P.apply_update(IntervalUpdate()).equals(P)
    assert P.apply_update({"x1": (0, 0)}).equals(poly(X, ["x1 = 0", "x2 = 7"]))
    assert poly(X1, "x1 = 5").apply_update({"x1": (1, 2)}).equals(poly(X1, "1 <= x1 <= 2"))
    with pytest.raises(ValueError):
        IntervalUpdate({"x1": (2, 1)})


def test_includes_and_equals():
    assert Polyhedron.universe(X).includes(poly(X, "x1 - x2 >= 3"))
    assert poly(X1, "115 <= x1 <= 125").includes(poly(X1, "x1 = 123"))
    assert not poly(X1, "x1 = 123").includes(poly(X1, "0 <= x1 <= 200"))
    P = poly(X, ["x1 + x2 <= 4", "x1 >= 0", "x2 >= 0"])
    assert P.equals(P)
    assert poly(X1, ["x1 <= 1", "x1 >= 1"]).equals(poly(X1, "x1 = 1"))
    assert Polyhedron.empty(X).equals(poly(X, ["x1 >= 1", "x1 <= 0"]))


def test_merge_if_convex():
    a, b, c = poly(X1, "0 <= x1 <= 1"), poly(X1, "1 <= x1 <= 2"), poly(X1, "2 <= x1 <= 3")
    assert merge_if_convex(a, b).equals(poly(X1, "0 <= x1 <= 2"))
    assert merge_if_convex(a, c) is None
    big = poly(X1, "0 <= x1 <= 5")
    assert merge_if_convex(a, big).equals(big)
    # L-shape is not convex
    s1 = poly(X, ["0 <= x1 <= 2", "0 <= x2 <= 1"])
    s2 = poly(X, ["0 <= x1 <= 1", "0 <= x2 <= 2"])
    assert merge_if_convex(s1, s2) is None


def test_covers_and_union_equals():
    box = poly(X, ["0 <= x1 <= 2", "0 <= x2 <= 2"])
    halves = [poly(X, ["0 <= x1 <= 1", "0 <= x2 <= 2"]), poly(X, ["1 <= x1 <= 2", "0 <= x2 <= 2"])]
    assert covers(halves, box)
    assert not covers(halves[:1], box)
    assert union_equals(halves, [box])
    assert not union_equals(halves[:1], [box])


def test_generators_round_trip():
    P = Polyhedron.from_generators(X, points=[(0, 0), (1, 0)], rays=[(0, 1)])
    assert P.equals(poly(X, ["0 <= x1 <= 1", "x2 >= 0"]))
    Q = Polyhedron.from_constraints(X, P.constraints())
    assert Q.equals(P)


def test_bounds():
    P = poly(X, ["0 <= x1 <= 3/2", "x2 >= x1"])
    assert P.bounds("x1") == (0, F(3, 2))
    assert P.bounds("x2") == (0, None)


def test_str_is_readable():
    assert str(poly(X, ["2*x1 - 2*x2 <= 4"])) == "x1 - x2 <= 2"
    assert str(Polyhedron.universe(X)) == "true"
    assert str(Polyhedron.empty(X)) == "false"


def test_lazy_polyhedron_materializes_on_demand():
    P = poly(X, ["x1 <= 1", "x1 >= 2"])
    assert P.constraints(minimal=False)  # raw rows, no conversion
    assert P.is_empty()
