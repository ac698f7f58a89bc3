import random
from collections import Counter

import pytest

from hwpkit.groups import add, cyclic_group, dihedral_group, group_sum, neg
from hwpkit.perms import (HallInfeasible, Permutation, VList, differences,
                          hall_delta_permutation, normalize_delta_permutation,
                          special_perm_1, special_perm_2,
                          verify_delta_permutation)


def vl(group, pairs):
    return VList.from_pairs(group, pairs)


def test_differences_examples():
    z4 = cyclic_group(4)
    assert differences(z4, Permutation.identity(z4)).counts == Counter({(0,): 4})
    shift = Permutation(z4, (1, 2, 3, 0))
    assert differences(z4, shift).counts == Counter({(1,): 4})
    phi = Permutation.from_map(z4, {(0,): (1,), (1,): (3,), (2,): (2,), (3,): (0,)})
    assert differences(z4, phi).counts == Counter({(1,): 2, (2,): 1, (0,): 1})


def test_differences_rejects_nonabelian():
    g = dihedral_group(3, 1, 1)
    with pytest.raises(ValueError):
        differences(g, Permutation.identity(g))


def test_verify_delta_permutation():
    z4 = cyclic_group(4)
    ident = Permutation.identity(z4)
    assert verify_delta_permutation(z4, ident, vl(z4, [(4, (0,))]))
    shift = Permutation(z4, (1, 2, 3, 0))
    assert not verify_delta_permutation(z4, shift, vl(z4, [(4, (0,))]))
    phi = Permutation.from_map(z4, {(0,): (1,), (1,): (3,), (2,): (2,), (3,): (0,)})
    assert verify_delta_permutation(z4, phi, vl(z4, [(1, (0,)), (2, (1,)), (1, (2,))]))
    bad = verify_delta_permutation(z4, phi, vl(z4, [(2, (0,)), (2, (1,))]))
    assert not bad and bad.reason


def test_hall_fast_paths_and_rejection():
    z5 = cyclic_group(5)
    p = hall_delta_permutation(z5, vl(z5, [(5, (0,))]))
    assert p.images == tuple(range(5))
    with pytest.raises(HallInfeasible):
        hall_delta_permutation(cyclic_group(4),
                               vl(cyclic_group(4), [(3, (1,)), (1, (2,))]))


def test_hall_whole_group_list():
    z33 = cyclic_group(3, 3)
    whole = VList(z33, Counter({a: 1 for a in z33.elements}))
    p = hall_delta_permutation(z33, whole, seed=1)
    assert verify_delta_permutation(z33, p, whole)


def test_hall_with_pins():
    z4 = cyclic_group(4)
    delta = vl(z4, [(1, (0,)), (2, (1,)), (1, (2,))])
    p = hall_delta_permutation(z4, delta, pins={(0,): (2,)})
    assert p.apply((0,)) == (2,)
    assert verify_delta_permutation(z4, p, delta)
    with pytest.raises(HallInfeasible):
        hall_delta_permutation(z4, delta, pins={(0,): (3,)})


def all_abelian_groups_up_to(bound):
    """One moduli tuple per isomorphism type of abelian group of order <= bound."""
    out = []
    for order in range(2, bound + 1):
        out.extend(_partition_types(order))
    return out


def _partition_types(order):
    # invariant-factor decompositions: d_1 | d_2 | ... with product = order
    def rec(n, max_d):
        if n == 1:
            return [()]
        res = []
        for d in range(2, min(n, max_d) + 1):
            if n % d == 0:
                res.extend([(d,) + rest for rest in rec(n // d, d)])
        return res

    return [tuple(reversed(t)) for t in rec(order, order)]


def test_hall_random_zero_sum_lists_small_groups():
    rng = random.Random(0)
    for mods in all_abelian_groups_up_to(12):
        G = cyclic_group(*mods)
        for trial in range(20):
            els = [G.elements[rng.randrange(G.order)] for _ in range(G.order - 1)]
            els.append(neg(G, group_sum(G, els)))
            delta = VList(G, Counter(els))
            perm = hall_delta_permutation(G, delta, seed=trial)
            assert verify_delta_permutation(G, perm, delta), (mods, trial)


def test_normalize_preserves_multiset():
    z4 = cyclic_group(4)
    delta = vl(z4, [(1, (0,)), (2, (1,)), (1, (2,))])
    p = hall_delta_permutation(z4, delta, seed=3)
    q = normalize_delta_permutation(z4, p, (0,), (2,))
    assert add(z4, q.apply((0,)), neg(z4, (0,))) == (2,)
    assert differences(z4, q).counts == delta.counts
    with pytest.raises(ValueError):
        normalize_delta_permutation(z4, p, (0,), (3,))


def test_normalize_noop_when_already_pinned():
    z4 = cyclic_group(4)
    delta = vl(z4, [(1, (0,)), (2, (1,)), (1, (2,))])
    p = hall_delta_permutation(z4, delta, pins={(0,): (2,)})
    q = normalize_delta_permutation(z4, p, (0,), (2,))
    assert q.images == p.images


def test_special_perm_1_small_example():
    g, s, d = special_perm_1(1, 2)
    assert s.apply((0, 0)) == (0, 0) and s.apply((0, 1)) == (0, 1)
    assert s.apply((0, 2)) == (0, 3) and s.apply((0, 3)) == (0, 2)
    assert d.counts == Counter({(0, 0): 2, (0, 1): 1, (0, 3): 1})


@pytest.mark.parametrize("m", [1, 3, 5])
@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 7])
def test_special_perm_1_grid(m, n):
    g, s, d = special_perm_1(m, n)      # postconditions assert internally
    half = (m - 1) // 2
    u = (n + 1) // 2
    assert s.apply((0, 0)) == (0, 0)
    fixed2 = ((-half) % m, (u + half * n) % (2 * n))
    assert s.apply(fixed2) == fixed2
    for a in g.elements:                # involution away from fixed points
        assert s.apply(s.apply(a)) == a
    assert verify_delta_permutation(g, s, d)


def test_special_perm_2_small_example():
    g, s, d = special_perm_2(1, 3)
    assert s.apply((0, 0)) == (0, 3)
    assert s.apply((0, 3)) == (0, 5)
    assert d.counts == Counter({(0, 0): 3, (0, 1): 1, (0, 2): 1, (0, 3): 1})


@pytest.mark.parametrize("m", [1, 3, 5])
@pytest.mark.parametrize("n", [3, 5, 7])
def test_special_perm_2_grid(m, n):
    g, s, d = special_perm_2(m, n)
    assert s.apply((0, 0)) == (0, n)
    assert s.apply((0, n)) == (0, (n + 2) % (2 * n))
    assert verify_delta_permutation(g, s, d)
    with pytest.raises(ValueError):
        special_perm_2(m, 2)
    with pytest.raises(ValueError):
        special_perm_2(m, 1)


def test_vlist_text_round_trip():
    g = cyclic_group(3, 4)
    v = VList.parse(g, "[^3 (0,0), ^1 (0,2), (1,1)]")
    assert v.counts == Counter({(0, 0): 3, (0, 2): 1, (1, 1): 1})
    assert VList.parse(g, v.format()).counts == v.counts
    gd = dihedral_group(3, 1, 1)
    v2 = VList.parse(gd, "[^2 ((1,2),1), ((0,0),0)]")
    assert v2.counts == Counter({(1, 2, 1): 2, (0, 0, 0): 1})


def test_permutation_serialization_is_index_based():
    g = cyclic_group(3, 3)
    p = Permutation(g, tuple(reversed(range(9))))
    assert Permutation(g, p.images) == p
    with pytest.raises(ValueError):
        Permutation(g, (0,) * 9)
