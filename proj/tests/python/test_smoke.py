import math

import pytest

import crplab


def test_exact_law_two_customers():
    law = crplab.exact_law(2, 0.5, 0.3, 0.7)
    assert law[(1, 1)] == pytest.approx(2 / 3)
    assert law[(2,)] == pytest.approx(1 / 3)


def test_exact_matches_bruteforce():
    a = crplab.exact_law(5, 0.25, 1.0, 0.3)
    b = crplab.bruteforce_law(5, 0.25, 1.0, 0.3)
    assert a.keys() == b.keys()
    assert max(abs(a[k] - b[k]) for k in a) < 1e-12
    assert crplab.sampling_consistency(4, 0.25, 1.0, 0.3) < 1e-12


def test_samplers_are_seeded():
    c = crplab.sample_ocrp(50, 0.5, 0.3, 0.7, seed=3)
    assert sum(c) == 50
    assert c == crplab.sample_ocrp(50, 0.5, 0.3, 0.7, seed=3)
    b = crplab.sample_pdip(0.5, 0.3, 0.7, 1000, seed=1)
    assert sum(r - l for l, r in b) == pytest.approx(1.0)
    s = crplab.sample_pdip(0.5, 0.3, 0.7, 1000, seed=1, structural=True)
    assert sum(r - l for l, r in s) == pytest.approx(1.0)


def test_hausdorff():
    assert crplab.hausdorff([(0, 1), (1, 2)], 2, [(0, 2)], 2) == pytest.approx(1.0)
    assert crplab.hausdorff([], 0, [], 0) == 0


def test_scale_function():
    assert crplab.scale_function(2, 1.0) == pytest.approx(1.5)
    assert crplab.hit_probability(5, 0.0) == pytest.approx(1 / 5)


def test_paths():
    path = crplab.simulate_updown(3, 0.5, 2.0, seed=4)
    assert path[0] == (0.0, 3)
    assert all(abs(b[1] - a[1]) == 1 for a, b in zip(path, path[1:]))
    pc = crplab.simulate_pcrp([2, 1], 0.5, 0.3, 0.7, 2.0, seed=5)
    assert all(abs(sum(b[1]) - sum(a[1])) == 1 for a, b in zip(pc, pc[1:]))
    lv = crplab.pcrp_via_clades([3], 0.5, [0.0, 0.5], seed=6)
    assert lv[0] == [3]


def test_nested_and_tree():
    coarse, fine = crplab.nested_ocrp(20, (0.25, 0.3, 0.25), (0.5, 0.0, 0.25), seed=7)
    assert sum(coarse) == sum(fine) == 20
    c, f = crplab.spinal_decomposition(6, 0.5, 0.4, seed=8)
    assert sum(c) == sum(f) == 5
    with pytest.raises(Exception):
        crplab.nested_ocrp(5, (0.25, 0.3, 0.25), (0.5, 0.1, 0.25), seed=1)


def test_fragmentation_reports():
    reps = crplab.fragmentation_identity((0.25, 0.3, 0.25), (0.5, 0.0, 0.25), 300, 300, seed=9)
    assert len(reps) == 2
    assert all(0.0 <= r["p_value"] <= 1.0 for r in reps)


def test_acceptance_subset():
    res = crplab.acceptance(42, ["A2", "A3"])
    assert [r["id"] for r in res] == ["A2", "A3"]
    assert all(r["pass"] for r in res)


def test_invalid_parameters():
    with pytest.raises(Exception):
        crplab.exact_law(3, 1.5, 0.0, 0.0)
    assert not math.isnan(crplab.scale_function(3, -0.5))
