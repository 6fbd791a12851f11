"""Acceptance suite: one test per criterion, each printing a PASS line.

The corpus for criteria 1, 2 and 4 is shared through a session fixture;
run with ``pytest tests/test_acceptance.py -s`` to watch the lines go by.
"""

import random
import time

import numpy as np
import pytest

from boxdepth import (
    AxisBox,
    Instance,
    NonnegativeMatrix,
    RealPolynomial,
    build_gadget,
    dd_degeneracy,
    dd_profile,
    dd_slabs,
    dd_to_klee,
    dd_to_maxdepth,
    degeneracy_ordering,
    direct_product,
    generate,
    intersection_graph,
    klee_degeneracy,
    klee_profile,
    maxdepth_degeneracy,
    maxdepth_profile,
    oracle_dd,
    poly_multiply,
    product_via_dd,
    sdc_depth_distribution,
    sdc_klee,
    sdc_max_depth,
)
from boxdepth.cli import run_profile_suite, run_scaling_suite
from boxdepth.geom import GENERATOR_KINDS

DIMS = (1, 2, 3, 4)
PER_COMBO = 200
TOL = 1e-9  # 1e-9 * |domain|, and generated domains are unit cubes


def _corpus_instances():
    for d in DIMS:
        for kind in GENERATOR_KINDS:
            for i in range(PER_COMBO):
                yield generate(kind, i % 16 + 1, d, seed=i)


@pytest.fixture(scope="module")
def corpus():
    """(instance, oracle values, sdc values) for the criterion-1 corpus,
    plus the wall time of the sdc-vs-oracle comparison itself."""
    start = time.perf_counter()
    out = []
    for inst in _corpus_instances():
        out.append(
            (inst, oracle_dd(inst).values, sdc_depth_distribution(inst).values)
        )
    elapsed = time.perf_counter() - start
    return out, elapsed


def report(num, text):
    print(f"ACCEPTANCE {num} PASS - {text}")


def test_criterion_1_oracle_equivalence(corpus):
    rows, elapsed = corpus
    assert len(rows) == len(DIMS) * len(GENERATOR_KINDS) * PER_COMBO
    worst = 0.0
    for _inst, want, got in rows:
        worst = max(worst, float(np.abs(got - want).max()))
    assert worst <= TOL
    assert elapsed < 120.0
    report(1, f"{len(rows)} instances, worst componentwise gap {worst:.2e}, "
              f"computed in {elapsed:.1f}s")


def test_criterion_2_refinement_identities(corpus):
    rows, _ = corpus
    for inst, want, got in rows:
        o_klee = float(want[1:].sum())
        o_md_idx = np.nonzero(want[1:] > 1e-12 * want.sum())[0]
        o_md = int(o_md_idx[-1]) + 1 if len(o_md_idx) else 0
        dd = sdc_depth_distribution(inst)
        assert abs(dd_to_klee(dd) - o_klee) <= TOL
        assert abs(sdc_klee(inst) - o_klee) <= TOL
        assert dd_to_maxdepth(dd) == o_md
        assert sdc_max_depth(inst) == o_md
    report(2, f"klee within {TOL:g} and max depth exact on {len(rows)} instances")


def test_criterion_3_slab_path():
    worst_dd = 0.0
    for d in (2, 3, 4):
        for seed in range(100):
            inst = generate("slabs", seed % 16 + 1, d, seed)
            got = dd_slabs(inst.boxes, inst.domain).values
            want = oracle_dd(inst).values
            worst_dd = max(worst_dd, float(np.abs(got - want).max()))
    assert worst_dd <= TOL
    rng = random.Random(33)
    worst_rel = 0.0
    for _ in range(100):
        a = RealPolynomial(tuple(rng.uniform(0.0, 5.0) for _ in range(rng.randint(1, 70))))
        b = RealPolynomial(tuple(rng.uniform(0.0, 5.0) for _ in range(rng.randint(1, 70))))
        direct = poly_multiply([a, b], method="direct").coeffs
        transform = poly_multiply([a, b], method="transform").coeffs
        for x, y in zip(direct, transform):
            worst_rel = max(worst_rel, abs(x - y) / max(1.0, abs(x)))
    assert worst_rel <= 1e-12
    report(3, f"300 slab instances (gap {worst_dd:.2e}); convolution paths "
              f"agree to {worst_rel:.2e}")


def test_criterion_4_adaptive_agreement(corpus):
    rows, _ = corpus
    worst = 0.0
    for inst, _want, sdc_values in rows:
        for values in (dd_profile(inst).values, dd_degeneracy(inst).values):
            worst = max(worst, float(np.abs(values - sdc_values).max()))
        assert abs(klee_profile(inst) - sdc_klee(inst)) <= TOL
        assert abs(klee_degeneracy(inst) - sdc_klee(inst)) <= TOL
        md = sdc_max_depth(inst)
        assert maxdepth_profile(inst) == md
        assert maxdepth_degeneracy(inst) == md
    assert worst <= TOL
    report(4, f"profile and degeneracy paths agree with sdc (gap {worst:.2e})")


def test_criterion_5_structural_invariants():
    rng = random.Random(55)
    trials = 0
    for _ in range(250):
        d = rng.choice((1, 2, 3))
        kind = rng.choice(GENERATOR_KINDS)
        inst = generate(kind, rng.randint(1, 12), d, rng.randrange(10_000))
        values = sdc_depth_distribution(inst).values
        # mass conservation
        assert abs(float(values.sum()) - 1.0) <= TOL
        # domain-cover shift
        cover = AxisBox((0.0,) * d, (1.0,) * d)
        shifted = sdc_depth_distribution(
            Instance(d, inst.domain, inst.boxes + (cover,))
        ).values
        assert shifted[0] == 0.0
        assert np.abs(shifted[1:] - values).max() <= 1e-12
        # permutation invariance
        boxes = list(inst.boxes)
        rng.shuffle(boxes)
        permuted = sdc_depth_distribution(Instance(d, inst.domain, tuple(boxes))).values
        assert np.abs(permuted - values).max() <= 1e-12
        # scaling covariance
        lam = [rng.uniform(0.25, 4.0) for _ in range(d)]
        scale = 1.0
        for f in lam:
            scale *= f
        scaled_inst = Instance(
            d,
            type(inst.domain)(
                tuple(l * f for l, f in zip(inst.domain.lo, lam)),
                tuple(h * f for h, f in zip(inst.domain.hi, lam)),
            ),
            tuple(
                AxisBox(
                    tuple(l * f for l, f in zip(b.lo, lam)),
                    tuple(h * f for h, f in zip(b.hi, lam)),
                )
                for b in inst.boxes
            ),
        )
        scaled = sdc_depth_distribution(scaled_inst).values
        assert np.abs(scaled - values * scale).max() <= TOL * max(1.0, scale)
        assert dd_to_maxdepth(sdc_depth_distribution(scaled_inst)) == dd_to_maxdepth(
            sdc_depth_distribution(inst)
        )
        trials += 4
    assert trials >= 1000
    report(5, f"{trials} invariant trials (mass, shift, permutation, scaling)")


def test_criterion_6_degeneracy_ordering():
    rng = random.Random(66)
    checked = 0
    for _ in range(200):
        d = rng.choice((2, 3))
        inst = generate(rng.choice(GENERATOR_KINDS), rng.randint(1, 16), d,
                        rng.randrange(10_000))
        g = intersection_graph(inst)
        ordering = degeneracy_ordering(g)
        position = {u: i for i, u in enumerate(ordering.order)}
        for v in range(g.n):
            earlier = sum(1 for w in g.adjacency[v] if position[w] < position[v])
            assert earlier <= ordering.k
        # independent recomputation by brute-force greedy removal
        alive = set(range(g.n))
        degree = {v: len(g.adjacency[v]) for v in alive}
        k = 0
        while alive:
            v = min(alive, key=lambda u: (degree[u], u))
            k = max(k, degree[v])
            alive.remove(v)
            for w in g.adjacency[v]:
                if w in alive:
                    degree[w] -= 1
        assert k == ordering.k
        checked += 1
    assert checked == 200
    report(6, "degeneracy ordering invariant and k recomputation on 200 graphs")


def test_criterion_7_matrix_reduction():
    rng = random.Random(77)
    worst = 0.0
    runs = 0
    for engine, max_order, trials in (("oracle", 6, 50), ("sdc", 12, 50)):
        for trial in range(trials):
            n = trial % max_order + 1
            a = NonnegativeMatrix(
                tuple(
                    tuple(0.0 if rng.random() < 0.1 else rng.uniform(0.0, 10.0)
                          for _ in range(n))
                    for _ in range(n)
                )
            )
            b = NonnegativeMatrix(
                tuple(
                    tuple(0.0 if rng.random() < 0.1 else rng.uniform(0.0, 10.0)
                          for _ in range(n))
                    for _ in range(n)
                )
            )
            assert build_gadget(a, b).n == 5 * n * n
            want = direct_product(a, b)
            got = product_via_dd(a, b, engine=engine)
            for grow, wrow in zip(got.entries, want.entries):
                for g, w in zip(grow, wrow):
                    if abs(w) >= 1e-9:
                        worst = max(worst, abs(g - w) / abs(w))
            runs += 1
    assert worst <= 1e-6
    report(7, f"{runs} reductions across both engines, worst relative error {worst:.2e}")


def test_criterion_8_performance_scaling():
    records, slope = run_scaling_suite(max_n=65536, d=2, repeats=1)
    largest = max(rec.millis for rec in records if rec.n == 65536)
    assert largest < 60_000.0
    assert 1.2 <= slope <= 1.9
    report(8, f"n=2^16 in {largest / 1000.0:.1f}s, log-log slope {slope:.2f}")


def test_criterion_9_profile_sensitivity():
    ps = (16, 64, 256, 1024)
    records = run_profile_suite(n=16384, d=2, repeats=3, ps=ps)
    medians = {}
    for p in ps:
        times = sorted(rec.millis for rec in records if rec.n == 16384 and
                       abs(rec.profile - p) <= 2 * p)
        # identify the group by construction order instead of measured profile
    medians = {}
    grouped = {p: [] for p in ps}
    idx = 0
    for p in ps:
        for _ in range(3):
            grouped[p].append(records[idx].millis)
            idx += 1
    for p in ps:
        grouped[p].sort()
        medians[p] = grouped[p][1]
    assert medians[16] <= medians[64] * 1.10
    assert medians[64] <= medians[256] * 1.10
    assert medians[256] <= medians[1024] * 1.10
    assert medians[16] * 2.0 <= medians[1024]
    report(9, "median dd_profile ms by profile " +
              ", ".join(f"p={p}: {medians[p]:.0f}" for p in ps))
