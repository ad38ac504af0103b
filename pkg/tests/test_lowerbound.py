import itertools
import random

import pytest

from arboral.geometry import PointSet, is_arborally_satisfied
from arboral.greedy import greedy_sweep
from arboral.pairs import classify_all
from arboral.lowerbound import (
    CERT_CSV_HEADER,
    OptLimitError,
    brute_force_opt,
    certificate_to_csv,
    check_good_interactions,
    check_independent,
    extract_certificate,
    good_rectangles,
    max_independent_set,
    verify_goodbound,
)


def families_of(perm):
    aug = greedy_sweep(perm)
    _, records = classify_all(aug)
    return aug, good_rectangles(records, aug)


def test_family_fixtures():
    _, (fb, fs) = families_of([1, 2, 3])
    assert (len(fb), len(fs)) == (2, 0)

    _, (fb, fs) = families_of([3, 1, 2, 5, 4])
    assert (len(fb), len(fs)) == (2, 2)
    assert {r.marked for r in fb.rects} == {(1, 3), (3, 4)}
    assert {r.marked for r in fs.rects} == {(3, 2), (5, 5)}

    _, (fb, fs) = families_of([1])
    assert (len(fb), len(fs)) == (0, 0)


def test_extract_certificate_identity3():
    aug, (fb, fs) = families_of([1, 2, 3])
    cert = extract_certificate(fb, aug.point_set())
    assert len(cert) == 2
    pairs = {(m.a, m.b) for m in cert.markings}
    assert len(pairs) == 2
    assert extract_certificate(fs, aug.point_set()).markings == ()


def test_extract_certificate_fixture_against_opt():
    perm = [3, 1, 2, 5, 4]
    aug, (fb, fs) = families_of(perm)
    opt = brute_force_opt(perm)
    for fam in (fb, fs):
        cert = extract_certificate(fam, opt.superset)
        assert len(cert) == len(fam)
    assert 2 * opt.size >= len(fb) + len(fs)


def test_certificate_csv():
    aug, (fb, fs) = families_of([3, 1, 2, 5, 4])
    certs = [extract_certificate(fb, aug.point_set()), extract_certificate(fs, aug.point_set())]
    text = certificate_to_csv(certs)
    lines = text.strip().splitlines()
    assert lines[0] == CERT_CSV_HEADER
    assert len(lines) == 5
    assert sum(ln.startswith("backslash,") for ln in lines[1:]) == 2
    assert sum(ln.startswith("slash,") for ln in lines[1:]) == 2
    for ln in lines[1:]:
        assert int(ln.split(",")[5]) % 2 == 1  # doubled line positions are odd


def test_brute_force_opt_examples():
    assert brute_force_opt([1]).size == 0
    assert brute_force_opt([2, 1]).size == 1
    res = brute_force_opt([1, 2, 3])
    assert res.size == 2
    assert is_arborally_satisfied(res.superset).satisfied
    with pytest.raises(OptLimitError):
        brute_force_opt(list(range(1, 8)))


def test_opt_never_beats_greedy_and_is_satisfied():
    rng = random.Random(4)
    for _ in range(30):
        n = rng.randint(1, 6)
        perm = list(range(1, n + 1))
        rng.shuffle(perm)
        aug = greedy_sweep(perm)
        res = brute_force_opt(perm)
        assert res.size <= aug.g_size
        assert is_arborally_satisfied(res.superset).satisfied


def test_verify_goodbound_examples():
    rep = verify_goodbound([1, 2, 3])
    assert rep["claim_holds"] and rep["gr_half_plus_n"] == 4.0 and rep["x_union_opt"] == 5
    assert verify_goodbound([2, 1])["claim_holds"]
    rep1 = verify_goodbound([1])
    assert rep1["claim_holds"] and rep1["gr_half_plus_n"] == 1.0 and rep1["x_union_opt"] == 1


def test_check_independent_examples():
    x = PointSet.from_permutation([2, 4, 1, 3])
    assert check_independent(x, [((2, 1), (1, 3))]) is True
    assert check_independent(x, [((2, 1), (1, 3)), ((2, 1), (1, 3))]) is False
    assert check_independent(x, [((2, 1), (1, 3)), ((4, 2), (3, 4))]) is True
    # A satisfied rectangle is rejected.
    x3 = PointSet.from_permutation([1, 2, 3])
    assert check_independent(x3, [((1, 1), (3, 3))]) is False


def test_max_independent_set_lower_bounds_opt():
    for n in range(1, 6):
        for perm in itertools.permutations(range(1, n + 1)):
            perm = list(perm)
            mis = max_independent_set(PointSet.from_permutation(perm))
            assert check_independent(PointSet.from_permutation(perm), mis)
            opt = brute_force_opt(perm)
            assert 2 * opt.size >= len(mis), perm


def test_interactions_clean_small():
    for n in range(1, 7):
        for perm in itertools.permutations(range(1, n + 1)):
            aug = greedy_sweep(list(perm))
            assert check_good_interactions(aug) == [], perm
