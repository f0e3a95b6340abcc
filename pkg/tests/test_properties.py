"""Randomized property suites, 1000 cases each."""
from fractions import Fraction as F

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hamon.benchmarks import acci, accd, platoon
from hamon.geometry import LinearConstraint, Polyhedron, VarSpace, merge_if_convex
from hamon.log import Sample, TimedQuantitativeWord, format_log, generate_log, parse_log
from hamon.monitor import LOG_INCONSISTENT, MonitorSession

CASES = settings(max_examples=1000)

SPACES = {n: VarSpace([f"x{i}" for i in range(1, n + 1)]) for n in range(1, 5)}
small = st.integers(-3, 3)
rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def constraint(draw, n):
    coeffs = tuple(F(draw(small)) for _ in range(n))
    rel = draw(st.sampled_from(["<=", ">=", "="] if draw(st.integers(0, 5)) == 0 else ["<=", ">="]))
    return LinearConstraint(coeffs, rel, F(draw(st.integers(-5, 5))))


@st.composite
def polyhedron(draw, n=None, max_rows=6, bounded=False):
    n = n or draw(st.integers(1, 4))
    space = SPACES[n]
    cons = draw(st.lists(constraint(n), max_size=max_rows))
    if bounded:
        for i in range(n):
            e = tuple(F(int(k == i)) for k in range(n))
            cons.append(LinearConstraint(e, ">=", F(draw(st.integers(-6, 0)))))
            cons.append(LinearConstraint(e, "<=", F(draw(st.integers(0, 6)))))
    return space, cons, Polyhedron.from_constraints(space, cons)


def holds_all(cons, point):
    return all(c.holds(point) for c in cons)


def convex_combo(draw, pts):
    w = [draw(st.integers(0, 6)) for _ in pts]
    if not any(w):
        w[0] = 1
    tot = sum(w)
    return tuple(sum(F(wi, tot) * p[k] for wi, p in zip(w, pts)) for k in range(len(pts[0])))


@CASES
@given(polyhedron(), st.data())
def test_double_description_round_trip(sys, data):
    space, cons, P = sys
    pts, rays, lines = P.generators()
    from_gens = Polyhedron.from_generators(space, pts, rays, lines)
    from_cons = Polyhedron.from_constraints(space, P.constraints())
    assert P.equals(from_gens)
    assert P.equals(from_cons)
    # membership by raw constraint evaluation agrees with the converted form
    p = tuple(data.draw(rationals) for _ in range(len(space)))
    assert holds_all(cons, p) == from_gens.contains_point(p)
    for v in pts:
        assert holds_all(cons, v)


@CASES
@given(st.integers(1, 3), st.data())
def test_elapse_contains_simulated_endpoint(n, data):
    space = SPACES[n]
    dspace = space.derivatives()
    p = tuple(data.draw(rationals) for _ in range(n))
    # flow: box or a small random polytope given by vertices
    if data.draw(st.booleans()):
        cons = []
        for i in range(n):
            lo = data.draw(st.integers(-4, 4))
            hi = lo + data.draw(st.integers(0, 4))
            e = tuple(F(int(k == i)) for k in range(n))
            cons += [LinearConstraint(e, ">=", F(lo)), LinearConstraint(e, "<=", F(hi))]
        flow = Polyhedron.from_constraints(dspace, cons)
    else:
        verts = data.draw(st.lists(st.tuples(*[st.integers(-4, 4)] * n), min_size=1, max_size=4))
        flow = Polyhedron.from_generators(dspace, points=verts)
    d = data.draw(st.fractions(min_value=0, max_value=10, max_denominator=8))
    fv = flow.vertices()
    f = convex_combo(data.draw, fv)
    end = tuple(a + d * b for a, b in zip(p, f))
    start = Polyhedron.from_point(space, p)
    assert start.time_elapse(flow, d).contains_point(end)
    assert start.time_elapse(flow).contains_point(end)
    # with an explicit clock the same endpoint appears at clock = d
    T = space.extend(["t"])
    tflow = flow.embed(T.derivatives()).add_constraints(
        [LinearConstraint(tuple(F(int(k == n)) for k in range(n + 1)), "=", F(1))]
    )
    clocked = Polyhedron.from_point(T, p + (0,)).time_elapse(tflow, d, "t")
    assert clocked.contains_point(end + (d,))


@CASES
@given(st.integers(2, 4).flatmap(lambda n: polyhedron(n, max_rows=4, bounded=True)), st.data())
def test_eliminate_matches_vertex_projection(sys, data):
    space, cons, P = sys
    assume(not P.is_empty())
    drop = data.draw(st.lists(st.sampled_from(space.names), min_size=1, max_size=len(space) - 1, unique=True))
    keep = [i for i, v in enumerate(space.names) if v not in drop]
    proj = [tuple(v[i] for i in keep) for v in P.vertices()]
    target = space.without(drop)
    assert P.eliminate(drop).equals(Polyhedron.from_generators(target, points=proj))


def _box(draw, n):
    cons = []
    for i in range(n):
        lo = draw(st.integers(-4, 4))
        hi = lo + draw(st.integers(0, 4))
        e = tuple(F(int(k == i)) for k in range(n))
        cons += [LinearConstraint(e, ">=", F(lo)), LinearConstraint(e, "<=", F(hi))]
    return cons


@CASES
@given(st.integers(1, 2), st.data())
def test_merge_exactness(n, data):
    space = SPACES[n]
    pc, qc = _box(data.draw, n), _box(data.draw, n)
    P, Q = Polyhedron.from_constraints(space, pc), Polyhedron.from_constraints(space, qc)
    H = merge_if_convex(P, Q)

    def in_union(x):
        return holds_all(pc, x) or holds_all(qc, x)

    hull = P.hull(Q)
    hv = hull.vertices()
    if H is not None:
        assert H.includes(P) and H.includes(Q)
        assert all(in_union(v) for v in H.vertices())
        assert H.equals(hull)
    # probe points of the hull: vertex-pair midpoints, triangle centroids, a 1/6 grid
    probes = [tuple((a + b) / 2 for a, b in zip(u, v)) for u in hv for v in hv]
    probes += [tuple((a + b + c) / 3 for a, b, c in zip(u, v, w)) for u in hv for v in hv for w in hv]
    lo = [min(v[k] for v in hv) for k in range(n)]
    hi = [max(v[k] for v in hv) for k in range(n)]
    grid = [[lo[k] + F(j, 6) for j in range(int((hi[k] - lo[k]) * 6) + 1)] for k in range(n)]
    if n == 1:
        probes += [(x,) for x in grid[0]]
    else:
        probes += [(x, y) for x in grid[0] for y in grid[1]]
    gap = any(hull.contains_point(p) and not in_union(p) for p in probes)
    assert (H is None) == gap


names = st.lists(st.from_regex(r"[a-z][a-z0-9_]{0,5}", fullmatch=True), min_size=1, max_size=4, unique=True)


@CASES
@given(names.filter(lambda ns: "time" not in ns), st.data())
def test_log_round_trip(ns, data):
    space = VarSpace(ns)
    k = data.draw(st.integers(0, 6))
    gaps = data.draw(st.lists(st.fractions(min_value=0, max_value=50, max_denominator=1000), min_size=k, max_size=k))
    t, samples = F(0), []
    for g in gaps:
        t += g
        samples.append(Sample(t, tuple(data.draw(rationals) for _ in ns)))
    w = TimedQuantitativeWord(space, samples)
    text = format_log(w)
    assert parse_log(text) == w
    assert parse_log(text, space) == w
    assert format_log(parse_log(text)) == text


GEN_MODELS = {"ACCI": acci(), "platoon": platoon(), "ACCD(2,9/10)": accd(2, F(9, 10)), "ACCD(2,2)": accd(2, 2)}


@CASES
@given(st.sampled_from(sorted(GEN_MODELS)), st.integers(0, 10**6), st.integers(1, 8))
def test_generated_logs_are_model_consistent(name, seed, length):
    m = GEN_MODELS[name]
    w = generate_log(m, seed, length)
    assert len(w) == length
    assert w[0].timestamp == 0
    session = MonitorSession(m)
    for s in w:
        r = session.feed(s)
        assert r.diagnostic != LOG_INCONSISTENT
        assert session.states()
