
import pytest

from hamon.benchmarks import acci, platoon
from hamon.geometry import VarSpace
from hamon.log import TimedQuantitativeWord, parse_log
from hamon.model import poly
from hamon.oracle import OracleError, OracleGrid, brute_force_membership, flow_candidates, reachable_locations


def test_flow_candidates_box():
    D = VarSpace(["a", "b"])
    F = poly(D, ["0 <= a <= 2", "1 <= b <= 3"])
    c = flow_candidates(F)
    assert {(0, 1), (2, 1), (0, 3), (2, 3)} <= set(c)
    assert (1, 2) in c
    assert all(F.contains_point(p) for p in c)


def test_flow_candidates_with_ray():
    D = VarSpace(["a"])
    c = flow_candidates(poly(D, "a >= 1"), ray_scale=4)
    assert set(c) == {(1,), (5,)}


def test_platoon(platoon_log):
    assert brute_force_membership(acci(), platoon_log) == [False, False, True]


def test_second_sample_reachable(platoon_log):
    # the point (123, 117) at t = 10 is reachable in the base model
    assert reachable_locations(platoon(), platoon_log.prefix(2))[1]


def test_steep_log_unreachable():
    # x1 growing at 20 per time unit exceeds every flow bound
    w = parse_log("time,x1,x2\n0,40,35\n1,60,44\n")
    assert brute_force_membership(acci(), w) == [False, False]
    assert reachable_locations(acci(), w)[1] == set()


def test_empty_and_mismatch():
    assert brute_force_membership(acci(), TimedQuantitativeWord(VarSpace(["x1", "x2"]))) == []
    with pytest.raises(OracleError):
        brute_force_membership(acci(), parse_log("time,a\n0,1\n"))


def test_more_switches_find_more():
    w = parse_log("time,x1,x2\n0,40,35\n10,123,117\n")
    tight = reachable_locations(platoon(), w, OracleGrid(max_switches=0))
    loose = reachable_locations(platoon(), w, OracleGrid(max_switches=2))
    assert tight[1] <= loose[1]
