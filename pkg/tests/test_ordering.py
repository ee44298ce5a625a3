"""Tests for minimum circles, pruning potentials, and tree orderings."""

import numpy as np
import pytest

import csphere as cs
from csphere.ordering import (
    PruningProfile,
    compute_pruning_profile,
    delta2_sorted_columns,
    pac_full_order,
    pac_modified_order,
    pinv_order,
)


def profile_for(x, delta2, c):
    return compute_pruning_profile(np.asarray(x, complex), np.asarray(delta2, float), c)


class TestPruningProfile:
    def test_exact_hits_give_zero_radius(self, qpsk):
        x = np.array([qpsk.points[0], qpsk.points[2]])
        prof = profile_for(x, [0.5, 0.25], qpsk)
        assert prof.c_min == 0.0
        assert prof.mc_sets == ((0,), (2,))
        assert list(prof.potentials) == [3, 3]

    def test_single_symbol(self, qpsk):
        x = np.array([0.9 + 0.1j])
        prof = profile_for(x, [0.7], qpsk)
        d = np.abs(x[0] - qpsk.points) ** 2
        assert prof.c_min == pytest.approx(d.min() / 0.7, rel=1e-12)
        assert prof.mc_sets[0] == (int(np.argmin(d)),)
        assert prof.potentials[0] == 3

    def test_membership_matches_exhaustive_scan(self, qam16):
        # independent scalar scan of the inclusive membership rule, in the
        # same scaled domain the rule is stated in
        for seed in range(30):
            g = np.random.default_rng(seed)
            x = g.standard_normal(4) + 1j * g.standard_normal(4)
            delta2 = g.uniform(0.05, 2.0, size=4)
            prof = profile_for(x, delta2, qam16)
            c_min = max(
                min(
                    ((x[i] - s).real ** 2 + (x[i] - s).imag ** 2) / delta2[i]
                    for s in qam16.points
                )
                for i in range(4)
            )
            assert prof.c_min == pytest.approx(c_min, rel=1e-12)
            for i in range(4):
                want = tuple(
                    j
                    for j, s in enumerate(qam16.points)
                    if ((x[i] - s).real ** 2 + (x[i] - s).imag ** 2) / delta2[i]
                    <= prof.c_min
                )
                assert prof.mc_sets[i] == want
                assert prof.potentials[i] == qam16.size - len(want)

    def test_every_circle_nonempty(self, qam16, rng):
        for _ in range(50):
            x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            delta2 = rng.uniform(0.01, 3.0, size=3)
            prof = profile_for(x, delta2, qam16)
            assert all(len(s) >= 1 for s in prof.mc_sets)

    def test_c_min_is_smallest_candidate_preserving_factor(self, qpsk, rng):
        # for every full candidate vector, the strictest per-symbol factor it
        # satisfies is at least c_min
        x = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        delta2 = rng.uniform(0.1, 1.0, size=2)
        prof = profile_for(x, delta2, qpsk)
        for a in qpsk.points:
            for b in qpsk.points:
                cand_factor = max(
                    abs(x[0] - a) ** 2 / delta2[0], abs(x[1] - b) ** 2 / delta2[1]
                )
                assert prof.c_min <= cand_factor + 1e-12

    def test_potentials_follow_column_permutation(self, qam16, rng):
        x = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        delta2 = rng.uniform(0.05, 2.0, size=5)
        prof = profile_for(x, delta2, qam16)
        perm = np.array([3, 0, 4, 1, 2])
        prof_p = profile_for(x[perm], delta2[perm], qam16)
        assert np.array_equal(prof_p.potentials, prof.potentials[perm])

    def test_nonpositive_delta2_rejected(self, qpsk):
        with pytest.raises(ValueError):
            profile_for([0j, 0j], [1.0, 0.0], qpsk)


def make_profile(potentials):
    n = len(potentials)
    return PruningProfile(
        c_min=1.0,
        mc_sets=tuple((0,) for _ in range(n)),
        potentials=np.array(potentials),
    )


class TestPacFullOrder:
    def test_equal_potentials_identity(self):
        assert list(pac_full_order(make_profile([2, 2, 2]))) == [0, 1, 2]

    def test_sorted_leaf_to_root(self):
        # potentials (3,1,2) -> leaf-to-root order symbols (2,3,1), 0-based (1,2,0)
        assert list(pac_full_order(make_profile([3, 1, 2]))) == [1, 2, 0]

    def test_root_always_max_potential(self, rng):
        for _ in range(25):
            pot = rng.integers(0, 10, size=6)
            perm = pac_full_order(make_profile(pot))
            assert pot[perm[-1]] == pot.max()
            assert np.array_equal(np.sort(perm), np.arange(6))


class TestPacModifiedOrder:
    def test_single_symbol_identity(self):
        assert list(pac_modified_order(make_profile([5]), np.array([0.4]))) == [0]

    def test_direct_application(self):
        # potentials (0,5,0), delta2 (0.3,0.2,0.1): root symbol 2 (0-based 1),
        # leaf positions hold symbols (1,3) by descending delta2
        perm = pac_modified_order(make_profile([0, 5, 0]), np.array([0.3, 0.2, 0.1]))
        assert list(perm) == [0, 2, 1]

    def test_root_tie_breaks_to_smaller_delta2(self):
        perm = pac_modified_order(make_profile([4, 4, 1]), np.array([0.5, 0.2, 0.9]))
        assert perm[-1] == 1

    def test_is_member_of_family_orderings(self, qam16, rng):
        # output always keeps the delta2-descending order with one symbol
        # moved to the root, i.e. one of the n shifted-column arrangements
        for _ in range(40):
            x = rng.standard_normal(5) + 1j * rng.standard_normal(5)
            delta2 = rng.uniform(0.05, 2.0, size=5)
            prof = profile_for(x, delta2, qam16)
            perm = pac_modified_order(prof, delta2)
            sort_perm = delta2_sorted_columns(delta2)
            root = perm[-1]
            expect = np.concatenate([[i for i in sort_perm if i != root], [root]])
            assert np.array_equal(perm, expect)


class TestPinvOrder:
    def test_equal_values_identity(self):
        assert list(pinv_order(np.array([0.5, 0.5, 0.5]))) == [0, 1, 2]

    def test_smallest_at_root(self):
        # delta2 (0.1, 0.4, 0.2): root symbol 1, then 3, leaf 2 (1-based)
        assert list(pinv_order(np.array([0.1, 0.4, 0.2]))) == [1, 2, 0]

    def test_agrees_with_pac_modified_when_argmax_has_smallest_delta2(self, qam16, rng):
        hits = 0
        for _ in range(200):
            x = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            delta2 = rng.uniform(0.05, 2.0, size=4)
            prof = profile_for(x, delta2, qam16)
            argmaxes = np.flatnonzero(prof.potentials == prof.potentials.max())
            if len(argmaxes) == 1 and argmaxes[0] == np.argmin(delta2):
                hits += 1
                assert np.array_equal(pac_modified_order(prof, delta2), pinv_order(delta2))
        assert hits > 0
