from fractions import Fraction as F

import pytest

from hamon.benchmarks import acci, platoon
from hamon.geometry import Polyhedron, VarSpace
from hamon.log import (
    GenerationStuck,
    LogFormatError,
    Sample,
    TimedQuantitativeWord,
    format_log,
    generate_log,
    parse_log,
    random_point,
)
from hamon.model import Lha, Location, poly
from hamon.monitor import run_monitor

X = VarSpace(["x1", "x2"])


def test_platoon_log(platoon_log):
    w = platoon_log
    assert len(w) == 3
    assert [s.timestamp for s in w] == [0, 10, 20]
    assert [s.values for s in w] == [(40, 35), (123, 117), (203, 201)]
    assert w.prefix(2) == TimedQuantitativeWord(X, w.samples[:2])
    assert w.prefix(2)[1].valuation(X) == {"x1": 123, "x2": 117}


def test_empty_body():
    assert len(parse_log("time,x1,x2\n")) == 0
    assert len(parse_log("", X)) == 0
    with pytest.raises(LogFormatError):
        parse_log("")


def test_comments_and_decimals():
    w = parse_log("# a comment\ntime, x1\n\n0, 8.5\n# mid\n1/3, -2\n")
    assert w[1].timestamp == F(1, 3) and w[0].values == (F(17, 2),)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("time,x1,x2\n0,1,2\n5,1,2\n3,1,2\n", "decreases"),
        ("time,x1\n0,1\n", "missing"),
        ("time,x1,x2\n0,1\n", "expected 3 cells"),
        ("time,x1,x2\n0,1,abc\n", "malformed"),
        ("t,x1,x2\n", "header"),
        ("time,x1,x2\n-1,0,0\n", "negative"),
    ],
)
def test_errors(text, fragment):
    with pytest.raises(LogFormatError, match=fragment):
        parse_log(text, X if "missing" in fragment else None)


def test_column_order_must_match():
    with pytest.raises(LogFormatError):
        parse_log("time,x2,x1\n0,1,2\n", X)


def test_equal_timestamps_allowed():
    w = parse_log("time,x1\n1,0\n1,0\n")
    assert len(w) == 2


def test_format_round_trip(platoon_log):
    assert parse_log(format_log(platoon_log)) == platoon_log


def test_sample_rejects_floats():
    with pytest.raises(TypeError):
        Sample(0.5, (1,))


class TestGenerate:
    def test_deterministic(self):
        assert generate_log(acci(), 7, 20) == generate_log(acci(), 7, 20)
        assert generate_log(acci(), 7, 20) != generate_log(acci(), 8, 20)

    def test_length_zero(self):
        assert len(generate_log(acci(), 1, 0)) == 0

    def test_grid_and_range(self):
        w = generate_log(acci(), 3, 50, (F(1), F(5)))
        assert w[0].timestamp == 0
        gaps = [b.timestamp - a.timestamp for a, b in zip(w.samples, w.samples[1:])]
        assert all(1 <= g <= 5 and (g * 1000).denominator == 1 for g in gaps)

    def test_short_logs_accepted_by_generator(self):
        # without the violation component every index is consistent
        for seed in range(10):
            w = generate_log(acci(), seed, 3)
            base = platoon()
            r = run_monitor(base, w)
            assert all(x.diagnostic is None for x in r.results)

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            generate_log(acci(), 0, 5, (3, 1))
        with pytest.raises(ValueError):
            generate_log(acci(), 0, -1)

    def test_stuck_reports_partial_log(self):
        D = X.derivatives()
        # flows out of the invariant immediately and has nowhere to go
        trap = Location("a", poly(D, ["x1' = 1", "x2' = 0"]), poly(X, "x1 <= 1"), poly(X, ["x1 = 1", "x2 = 0"]))
        with pytest.raises(GenerationStuck) as info:
            generate_log(Lha(X, [trap], []), 0, 5)
        assert len(info.value.partial) == 1

    def test_no_initial_location(self):
        D = X.derivatives()
        loc = Location("a", poly(D, "x1' = 1"), Polyhedron.universe(X), Polyhedron.empty(X))
        with pytest.raises(ValueError):
            generate_log(Lha(X, [loc], []), 0, 3)


def test_random_point_inside():
    import random

    rng = random.Random(1)
    P = poly(X, ["x1 >= 0", "x2 >= x1", "x2 <= 4"])
    for _ in range(50):
        assert P.contains_point(random_point(rng, P))
    U = poly(X, ["x1 >= 0"])  # unbounded, with a line
    for _ in range(20):
        assert U.contains_point(random_point(rng, U))
