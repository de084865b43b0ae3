import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from junkfilter.metrics import MetricStatus, bhattacharyya_fidelity, infidelity, kl_from_uniform, kl_junk, kl_useful
from junkfilter.mitigation import apply_global_depolarizing
from junkfilter.subspace import SubspaceIndex, build_subspace


def singleton_groups(idx: SubspaceIndex) -> SubspaceIndex:
    return SubspaceIndex(idx.n_qubits, idx.n_excitations, idx.useful, idx.junk, tuple((str(i), (i,)) for i in idx.junk))


class TestFidelity:
    def test_same(self):
        p = np.array([0.2, 0.3, 0.5])
        assert bhattacharyya_fidelity(p, p).value == pytest.approx(1.0)
        assert infidelity(p, p).value == pytest.approx(0.0, abs=1e-15)

    def test_disjoint(self):
        assert bhattacharyya_fidelity([1, 0], [0, 1]).value == 0.0
        assert infidelity([1, 0], [0, 1]).value == 1.0

    def test_half(self):
        assert bhattacharyya_fidelity([1, 0], [0.5, 0.5]).value == pytest.approx(math.sqrt(0.5))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            bhattacharyya_fidelity([1, 0], [1, 0, 0])

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_symmetry_permutation_and_definition(self, seed):
        rng = np.random.default_rng(seed)
        p, q = rng.dirichlet(np.ones(8)), rng.dirichlet(np.ones(8))
        f = bhattacharyya_fidelity(p, q).value
        assert f == pytest.approx(bhattacharyya_fidelity(q, p).value, abs=1e-15)
        perm = rng.permutation(8)
        assert f == pytest.approx(bhattacharyya_fidelity(p[perm], q[perm]).value, abs=1e-15)
        assert abs(infidelity(p, q).value - (1 - f)) <= 1e-15
        assert 0 <= f <= 1 + 1e-9


class TestKlJunk:
    def test_flat_is_zero(self):
        idx = build_subspace(4, 2)
        assert kl_junk(np.full(16, 1 / 16), idx).value == pytest.approx(0.0, abs=1e-15)

    def test_three_group_value(self):
        idx = build_subspace(4, 2, "paper-4q")
        pops = np.zeros(16)
        # per-state means 0.5, 0.25, 0.25 (then normalised) for groups {0,4}, {1}, {3}
        for (label, members), mean in zip(idx.groups, (0.5, 0.25, 0.25)):
            pops[list(members)] = mean
        pops /= pops.sum()
        expected = (math.log((1 / 3) / 0.5) + 2 * math.log((1 / 3) / 0.25)) / 3
        assert kl_junk(pops, idx).value == pytest.approx(expected, abs=1e-14)
        assert expected == pytest.approx(0.0566, abs=1e-4)

    def test_zero_junk_mass_undefined(self):
        pops = np.zeros(16)
        pops[3] = 1.0
        out = kl_junk(pops, build_subspace(4, 2))
        assert out.status is MetricStatus.UNDEFINED_ZERO_MASS and math.isnan(out.value)

    def test_empty_group_undefined(self):
        idx = build_subspace(4, 2)
        pops = np.zeros(16)
        pops[[0b0001, 0b0111, 0b0011]] = [0.1, 0.1, 0.8]
        assert not kl_junk(pops, idx).ok

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_singleton_groups_equal_plain_kl(self, seed):
        idx = singleton_groups(build_subspace(4, 2))
        p = np.random.default_rng(seed).dirichlet(np.ones(16))
        junk = p[list(idx.junk)]
        junk = junk / junk.sum()
        plain = float(np.mean(np.log((1 / len(junk)) / junk)))
        assert kl_junk(p, idx).value == pytest.approx(plain, abs=1e-12)

    @pytest.mark.parametrize("grouping,n,ne", [("default", 4, 2), ("paper-4q", 4, 2), ("default", 5, 2)])
    def test_globally_depolarized_is_flat(self, grouping, n, ne):
        idx = build_subspace(n, ne, grouping)
        rng = np.random.default_rng(0)
        u = list(idx.useful)
        rho = np.zeros((idx.dim, idx.dim))
        rho[u, u] = rng.dirichlet(np.ones(len(u)))
        for P in (0.01, 0.3, 1.0):
            pops = np.diag(apply_global_depolarizing(rho, P))
            assert abs(kl_junk(pops, idx).value) < 1e-12


class TestKlUseful:
    def test_uniform(self):
        idx = build_subspace(4, 2)
        pops = np.zeros(16)
        pops[list(idx.useful)] = 1 / 6
        assert kl_useful(pops, idx).value == pytest.approx(0.0, abs=1e-15)

    def test_value(self):
        idx = build_subspace(4, 2)
        pops = np.zeros(16)
        pops[list(idx.useful)] = [0.5, 0.1, 0.1, 0.1, 0.1, 0.1]
        expected = (math.log((1 / 6) / 0.5) + 5 * math.log((1 / 6) / 0.1)) / 6
        assert kl_useful(pops, idx).value == pytest.approx(expected, abs=1e-14)
        assert expected == pytest.approx(0.2425, abs=1e-4)

    def test_zero_entry(self):
        idx = build_subspace(4, 2)
        pops = np.zeros(16)
        pops[list(idx.useful)[:5]] = 0.2
        assert kl_useful(pops, idx).status is MetricStatus.UNDEFINED_ZERO_MASS


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 12))
def test_kl_nonnegative(seed, n):
    q = np.random.default_rng(seed).dirichlet(np.ones(n))
    v = kl_from_uniform(q)
    assert v.ok and v.value >= 0
