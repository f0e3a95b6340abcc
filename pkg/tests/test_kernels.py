import random
from fractions import Fraction

import pytest

from hamon.geometry import LinearConstraint, Polyhedron, VarSpace, kernels

X = VarSpace(["a", "b", "c"])
COMPILED = "cython" in kernels.available()


def random_poly(rng: random.Random, n_cons: int, scale: int = 5) -> Polyhedron:
    cons = []
    for _ in range(n_cons):
        coeffs = tuple(Fraction(rng.randint(-scale, scale)) for _ in range(len(X)))
        rel = rng.choice(["<=", ">=", "<=", "="])
        cons.append(LinearConstraint(coeffs, rel, Fraction(rng.randint(-3 * scale, 3 * scale))))
    return Polyhedron.from_constraints(X, cons)


def snapshot(P: Polyhedron):
    pts, rays, lines = P.generators()
    return P.is_empty(), sorted(pts), sorted(rays), len(lines), sorted(map(str, P.constraints()))


@pytest.fixture
def restore_backend():
    prev = kernels.active()
    yield
    kernels.use(prev)


def test_available_lists_python():
    assert "python" in kernels.available()
    assert kernels.active() in kernels.available()


def test_unknown_backend(restore_backend):
    with pytest.raises(ValueError):
        kernels.use("fortran")


@pytest.mark.skipif(not COMPILED, reason="compiled kernels not built")
def test_backends_agree_on_random_polyhedra(restore_backend):
    rng = random.Random(7)
    specs = [(rng.randint(1, 7), rng.getrandbits(32)) for _ in range(150)]
    results = {}
    for name in ("python", "cython"):
        kernels.use(name)
        out = []
        for n, seed in specs:
            r = random.Random(seed)
            P = random_poly(r, n)
            Q = random_poly(r, 3)
            out.append((snapshot(P), snapshot(P.intersect(Q)), snapshot(P.eliminate(["c"]))))
        results[name] = out
    assert results["python"] == results["cython"]


@pytest.mark.skipif(not COMPILED, reason="compiled kernels not built")
def test_overflow_falls_back(restore_backend):
    kernels.use("cython")
    big = 2**70
    P = Polyhedron.from_constraints(
        X,
        [
            LinearConstraint((Fraction(big), Fraction(1), Fraction(0)), "<=", Fraction(big + 3)),
            LinearConstraint((Fraction(1), Fraction(-big), Fraction(0)), ">=", Fraction(-5)),
            LinearConstraint((Fraction(0), Fraction(0), Fraction(1)), "=", Fraction(1, 3)),
            LinearConstraint((Fraction(1), Fraction(0), Fraction(0)), ">=", Fraction(0)),
            LinearConstraint((Fraction(0), Fraction(1), Fraction(0)), ">=", Fraction(0)),
        ],
    )
    got = snapshot(P)
    kernels.use("python")
    assert snapshot(Polyhedron.from_constraints(X, P.constraints())) == got
    assert P.contains_point((1, 0, Fraction(1, 3)))
