"""Smoke tests for the python bindings."""

import math

import pytest

import threshcal as tc

PAPER_STREAM = [(1, 1), (8, -2), (5, 3), (4, -4), (6, 5), (3, -6), (7, 7), (2, -8)]
PAPER_ROOTS = [
    (1, math.inf, 1, 0),
    (1, 8, 1, -2),
    (5, 8, 4, -2),
    (1, 4, 1, -3),
    (6, 8, 5, -2),
    (1, 3, 1, -4),
    (7, 8, 6, -2),
    (1, 2, 1, -5),
]


def raw_calibrator():
    return tc.Calibrator(tc.LossSpec(tc.LossMode.RAW), tc.MappingBounds(0, 1))


def test_reductions():
    spec = tc.LossSpec(tc.LossMode.SAMPLE_WEIGHTED, alpha=2)
    s = tc.reduce_to_linear(tc.LabeledObservation(0.3, 1, beta=3), spec)
    assert s.z == -6
    assert tc.weighted_error_offset(
        [tc.LabeledObservation(0.1, 1, 1), tc.LabeledObservation(0.2, 1, 2)], spec) == 6
    with pytest.raises(ValueError):
        tc.LabeledObservation(0.1, 2)


def test_solvers_agree():
    inst = tc.SortedInstance.from_unsorted(
        [tc.Sample(x, z) for x, z in PAPER_STREAM], tc.MappingBounds(0, 1))
    brute = tc.solve_brute_force(inst)
    it = tc.solve_iterative(inst)
    assert brute.loss == it.loss == -5
    assert (brute.x0, brute.x1) == (1, 2)
    assert tc.batch_build(inst).root_solution(inst.bounds).loss == -5


def test_sequential_replay():
    cal = raw_calibrator()
    for (x, z), expect in zip(PAPER_STREAM, PAPER_ROOTS):
        sol = cal.observe(tc.Sample(x, z))
        assert (sol.x0, sol.x1, sol.l0, sol.l1) == expect
    assert cal.predict(1) == 0
    assert cal.predict(2) == 1
    assert cal.predict(1.5) == 0
    assert cal.metrics().loss == -5
    assert cal.metrics().weighted_error is None
    assert cal.observations == 8


def test_merge_tree_audit():
    tree = tc.MergeTree()
    for x, z in PAPER_STREAM:
        tree.insert(tc.Sample(x, z))
    report = tree.audit()
    assert report.ok()
    assert report.depth == 3
    assert len(tree) == 8
    assert tree.root.l1 == -5


def test_snapshot_roundtrip():
    cal = raw_calibrator()
    for x, z in PAPER_STREAM[:4]:
        cal.observe(tc.Sample(x, z))
    blob = cal.snapshot()
    assert isinstance(blob, bytes) and blob.startswith(b"TCALSNAP")
    back = tc.Calibrator.restore(blob)
    for x, z in PAPER_STREAM[4:]:
        sol = back.observe(tc.Sample(x, z))
    assert (sol.x0, sol.x1, sol.l0, sol.l1) == (1, 2, 1, -5)
    with pytest.raises(tc.SnapshotError):
        tc.Calibrator.restore(blob[:-3])


def test_labeled_metrics():
    cal = tc.Calibrator(tc.LossSpec(tc.LossMode.PLAIN), tc.MappingBounds(0, 1))
    for i in range(6):
        cal.observe(tc.LabeledObservation(i, 1 if i >= 3 else 0))
    m = cal.metrics()
    assert m.weighted_error == 0
    assert m.accuracy == 1
    assert m.n == 6


def test_verify_harness():
    inst = tc.SortedInstance([tc.Sample(i + 1, z) for i, z in enumerate([1, 3, -2])],
                             tc.MappingBounds(0, 4))
    report = tc.verify_threshold_optimality(inst, 5)
    assert report.threshold_is_optimal
    assert len(report.witness) == 3
    assert tc.monotone_assignment_count(7, 5) == 330
