import pytest

from stgreedy.fields import DomainSpec, make_test_field
from stgreedy.harness import fit_rate, standard_corpus
from stgreedy.spacetime import (SpacetimeError, TimeSpacePartition,
                                build_fully_discrete, global_error,
                                projection_stability_check)

DOM = DomainSpec(T=1.0, n=1)


def test_constant_exact():
    f = make_test_field("constant", [1.0], DOM)
    part, fd, rep = build_fully_discrete(f, 0.25, 1, 2)
    assert rep["N_time"] == 1
    assert rep["total_cardinality"] == 1
    assert rep["global_error"] < 1e-10


def test_zero_approximant_norm():
    # F == 0 leaves exactly ||f||; for f == 1 on the unit cylinder that is 1
    f = make_test_field("constant", [1.0], DOM)
    part, fd, rep = build_fully_discrete(f, 0.25, 1, 2)
    for fem in fd.coeff_fems[0]:
        fem.dofs[:] = 0.0
    assert abs(global_error(f, fd) - 1.0) < 1e-10


def test_reproducible_tensor_build():
    # t * sin(pi x): time factor exact for r1 = 2, space greedy digs to eps
    f = make_test_field("tensor-singular", [1.0], DOM)
    part, fd, rep = build_fully_discrete(f, 1e-6, 2, 3)
    assert rep["N_time"] == 1
    assert rep["error_time_step"] < 1e-10
    assert rep["global_error"] <= 1e-6


def test_cardinality_consistency_and_triangle():
    f = make_test_field("tensor-singular", [0.25], DOM)
    part, fd, rep = build_fully_discrete(f, 0.05, 1, 2)
    assert rep["total_cardinality"] == sum(m.size for m in part.slice_meshes)
    assert part.cardinality == rep["total_cardinality"]
    tri = rep["error_time_step"] + rep["error_space_step"]
    assert rep["global_error"] <= tri + 1e-10


def test_monotone_improvement():
    f = make_test_field("tensor-singular", [0.25], DOM)
    cache = {}
    errs = []
    for eps in (0.2, 0.1, 0.05, 0.025):
        _, _, rep = build_fully_discrete(f, eps, 1, 2, time_cache=cache)
        errs.append(rep["global_error"])
    assert all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))


def test_same_degree_rate():
    # r1 = r2 = 2 with matched smoothness: error rate in #P approaches
    # s/(n+1); assert a conservative band on a short sweep
    f = make_test_field("tensor-singular", [0.75], DOM)
    cache = {}
    pts = []
    for eps in (2 ** -3, 2 ** -5, 2 ** -7, 2 ** -9):
        _, _, rep = build_fully_discrete(f, eps, 2, 2, time_cache=cache)
        pts.append((rep["total_cardinality"], rep["global_error"]))
    fit = fit_rate(pts, drop_smallest=0)
    assert fit.rate >= 0.6


def test_build_two_dimensional_domain():
    dom2 = DomainSpec(T=1.0, n=2)
    f = make_test_field("tensor-singular", [0.25], dom2)
    part, fd, rep = build_fully_discrete(f, 0.1, 1, 2)
    assert rep["N_time"] >= 2
    assert all(m.is_conforming() for m in part.slice_meshes)
    tri = rep["error_time_step"] + rep["error_space_step"]
    assert rep["global_error"] <= tri + 1e-10
    assert rep["global_error"] < 0.2


def test_partition_validation():
    f = make_test_field("constant", [1.0], DOM)
    part, fd, rep = build_fully_discrete(f, 0.5, 1, 2)
    with pytest.raises(SpacetimeError):
        TimeSpacePartition(time=part.time, slice_meshes=[])
    with pytest.raises(SpacetimeError):
        build_fully_discrete(f, -1.0, 1, 2)
    with pytest.raises(SpacetimeError):
        build_fully_discrete(f, 0.5, 1, 1)


def test_stability_trivial_ratios():
    # time-constant fields are reproduced exactly: ratio 1
    f = make_test_field("space-power", [0.3, 0.5], DOM)
    assert abs(projection_stability_check(f, (0, 1), 1, 0.5, 2.0) - 1.0) < 1e-6
    # t * g(x) with r1 = 2 is reproduced exactly as well
    f2 = make_test_field("tensor-singular", [1.0], DOM)
    assert abs(projection_stability_check(f2, (0, 1), 2, 1.5, 2.0) - 1.0) < 1e-6


def test_stability_corpus_guard():
    for f in standard_corpus(DOM):
        for s2 in (0.5, 1.5):
            r = projection_stability_check(f, (0, 1), 1, s2, 2.0)
            assert r <= 10.0


def test_stability_validation():
    f = make_test_field("constant", [1.0], DOM)
    with pytest.raises(SpacetimeError):
        projection_stability_check(f, (0, 1), 1, 0.5, 0.5)   # q2 < 1


def test_stability_2d():
    dom2 = DomainSpec(T=1.0, n=2)
    f = make_test_field("tensor-singular", [1.0], dom2)
    r = projection_stability_check(f, (0, 1), 2, 1.5, 2.0, grid_n=32)
    assert abs(r - 1.0) < 1e-6
