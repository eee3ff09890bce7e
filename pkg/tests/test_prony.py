import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from prony_lab.errors import (AmplitudeBelowFloor, DuplicateNodes,
                              MultiplicityMismatch, NodeCollision, SingularHankel)
from prony_lab.prony import (ConfluentPronySolution, PronySolution, canonical_order,
                             confluent_moments, prony_moments, solve_confluent_prony,
                             solve_prony_1d, symmetrize_conjugates)

from conftest import complex_prony_instances, prony_instances, separated_points


def summed_moments(x, a, K):
    """Independent oracle: explicit double loop."""
    out = []
    for k in range(K):
        s = 0
        for xj, aj in zip(x, a):
            s += aj * (xj ** k if k else 1)
        out.append(s)
    return np.array(out)


def confluent_oracle(x, amps, K):
    """``sum_j sum_i a_ij FF(k, i) x_j^(k-i)`` by explicit loops."""
    out = np.zeros(K, complex)
    for xj, aj in zip(x, amps):
        for i, aij in enumerate(aj):
            for k in range(i, K):
                ff = 1
                for t in range(i):
                    ff *= k - t
                out[k] += aij * ff * (xj ** (k - i) if k > i else 1)
    return out


class TestSolutionTypes:
    def test_canonical_order(self):
        sol = PronySolution([0.7, 0.3, 0.3j], [1, 2, 3])
        assert np.array_equal(sol.nodes, [0.3j, 0.3, 0.7])
        assert np.array_equal(sol.amplitudes, [3, 2, 1])

    def test_ties_broken_by_imaginary_part(self):
        x = np.array([0.5 + 0.1j, 0.5 - 0.1j])
        assert np.array_equal(x[canonical_order(x)], [0.5 - 0.1j, 0.5 + 0.1j])

    def test_duplicate_nodes_rejected(self):
        with pytest.raises(DuplicateNodes):
            PronySolution([0.3, 0.3], [1, 2])

    def test_zero_amplitude_rejected(self):
        with pytest.raises(AmplitudeBelowFloor):
            PronySolution([0.3, 0.4], [1, 0])

    def test_confluent_top_amplitude_nonzero(self):
        ConfluentPronySolution([0.5], ([0.0, 1.0],))        # lower orders may vanish
        with pytest.raises(AmplitudeBelowFloor):
            ConfluentPronySolution([0.5], ([1.0, 0.0],))


class TestForwardMaps:
    def test_examples(self):
        assert np.allclose(prony_moments(PronySolution([0], [1]), 3), [1, 0, 0])
        assert np.allclose(prony_moments(PronySolution([0.5], [2]), 4), [2, 1, 0.5, 0.25])
        assert np.allclose(prony_moments(PronySolution([0.3, 0.7], [1, -1]), 4),
                           [0, -0.4, -0.4, -0.316])

    @given(complex_prony_instances(max_n=5), st.integers(1, 12))
    def test_matches_loop_oracle(self, inst, K):
        x, a = inst
        assert np.allclose(prony_moments(PronySolution(x, a), K), summed_moments(x, a, K))

    def test_confluent_examples(self):
        s = ConfluentPronySolution([0.0], ([1.0, 1.0],))
        assert np.allclose(confluent_moments(s, 4), [1, 1, 0, 0])
        s = ConfluentPronySolution([0.5], ([1.0, 2.0],))
        assert np.allclose(confluent_moments(s, 4), [1, 2.5, 2.25, 1.625])

    def test_confluent_matches_loop_oracle(self):
        x = [0.2, -0.6]
        amps = ([1.0, -0.3, 2.0], [0.7])
        s = ConfluentPronySolution(x, amps)
        assert np.allclose(confluent_moments(s, 9), confluent_oracle(x, amps, 9))

    @given(complex_prony_instances(max_n=4))
    def test_confluent_degenerates_to_classical(self, inst):
        x, a = inst
        p = PronySolution(x, a)
        assert np.allclose(confluent_moments(ConfluentPronySolution.from_classical(p), 8),
                           prony_moments(p, 8))


class TestSolve1D:
    def test_examples(self):
        s = solve_prony_1d([1, 0, 0, 0], 1)
        assert np.allclose(s.nodes, [0]) and np.allclose(s.amplitudes, [1])
        s = solve_prony_1d([2, 1, 0.5, 0.25], 1)
        assert np.allclose(s.nodes, [0.5]) and np.allclose(s.amplitudes, [2])
        s = solve_prony_1d([0, -0.4, -0.4, -0.316], 2)
        assert np.max(np.abs(s.nodes - [0.3, 0.7])) < 1e-8
        assert np.max(np.abs(s.amplitudes - [1, -1])) < 1e-8

    @given(prony_instances())
    def test_real_roundtrip(self, inst):
        x, a = inst
        truth = PronySolution(x, a)
        est = solve_prony_1d(summed_moments(x, a, 2 * x.size).real, x.size)
        assert np.max(np.abs(est.nodes - truth.nodes)) < 1e-8
        assert np.max(np.abs(est.amplitudes - truth.amplitudes)) < 1e-7
        assert est.is_real()

    @given(complex_prony_instances())
    def test_complex_roundtrip(self, inst):
        x, a = inst
        truth = PronySolution(x, a)
        est = solve_prony_1d(summed_moments(x, a, 2 * x.size), x.size)
        assert np.max(np.abs(est.nodes - truth.nodes)) < 1e-8
        assert np.max(np.abs(est.amplitudes - truth.amplitudes)) < 1e-7

    def test_conjugate_pair_from_real_moments(self):
        x = np.array([0.4 + 0.3j, 0.4 - 0.3j, -0.5])
        a = np.array([1 - 0.5j, 1 + 0.5j, 2.0])
        m = summed_moments(x, a, 6)
        assert np.allclose(m.imag, 0)
        est = solve_prony_1d(m.real, 3)
        assert est.nodes[1] == np.conj(est.nodes[2])     # exact pairing

    def test_zero_node_via_degree_deficit(self):
        est = solve_prony_1d(summed_moments([0.0, 0.5], [1.0, 2.0], 4).real, 2)
        assert np.allclose(est.nodes, [0, 0.5], atol=1e-12)

    def test_overestimated_order(self):
        m = summed_moments([0.3, 0.7], [1.0, -1.0], 6).real
        with pytest.raises((SingularHankel, AmplitudeBelowFloor, NodeCollision)):
            solve_prony_1d(m, 3)

    def test_singular_hankel_rank(self):
        m = summed_moments([0.5], [2.0], 6).real
        with pytest.raises(SingularHankel) as info:
            solve_prony_1d(m, 3)
        assert info.value.rank == 1

    def test_uses_first_2n_moments(self):
        m = summed_moments([0.3, 0.7], [1.0, -1.0], 4).real
        tail = np.concatenate([m, [1e3, -1e3]])
        assert np.allclose(solve_prony_1d(tail, 2).nodes, solve_prony_1d(m, 2).nodes)

    def test_empty(self):
        assert solve_prony_1d([], 0).size == 0

    def test_too_few_moments(self):
        with pytest.raises(ValueError):
            solve_prony_1d([1.0, 2.0, 3.0], 2)


class TestConfluent:
    def test_single_double_node(self):
        s = solve_confluent_prony([1, 2.5, 2.25, 1.625], (2,))
        assert np.allclose(s.nodes, [0.5]) and np.allclose(s.amplitudes[0], [1, 2])

    def test_mixed_pattern(self):
        truth = ConfluentPronySolution([0.2, 0.8], ([1.0], [0.5, -2.0]))
        m = confluent_oracle(truth.nodes, truth.amplitudes, 6).real
        s = solve_confluent_prony(m, (1, 2))
        assert np.max(np.abs(s.nodes - truth.nodes)) < 1e-7
        for u, v in zip(s.amplitudes, truth.amplitudes):
            assert np.max(np.abs(u - v)) < 1e-7

    @given(prony_instances(max_n=5))
    def test_all_simple_matches_classical(self, inst):
        x, a = inst
        m = summed_moments(x, a, 2 * x.size).real
        c = solve_confluent_prony(m, (1,) * x.size)
        p = solve_prony_1d(m, x.size)
        assert np.max(np.abs(c.nodes - p.nodes)) < 1e-10
        assert np.max(np.abs(c.flat_amplitudes - p.amplitudes)) < 1e-10

    @given(st.integers(0, 2 ** 32 - 1))
    def test_random_roundtrip(self, seed):
        rng = np.random.default_rng(seed)
        n = rng.integers(1, 4)
        mult = rng.integers(1, 4, n)
        while mult.sum() > 6:
            mult[np.argmax(mult)] -= 1
        x = separated_points(rng, n, gap=0.2)
        amps = []
        for l in mult:
            a = rng.uniform(-2, 2, l)
            a[-1] = rng.choice([-1, 1]) * rng.uniform(0.5, 2)
            amps.append(a)
        truth = ConfluentPronySolution(x, tuple(amps))
        m = confluent_oracle(truth.nodes, truth.amplitudes, 2 * mult.sum()).real
        s = solve_confluent_prony(m, truth.multiplicities)
        assert np.max(np.abs(s.nodes - truth.nodes)) < 1e-7

    def test_zero_node_with_multiplicity(self):
        truth = ConfluentPronySolution([0.0, 0.6], ([1.0, 1.0], [-0.5]))
        s = solve_confluent_prony(confluent_moments(truth, 6).real, (2, 1))
        assert np.allclose(s.nodes, truth.nodes, atol=1e-10)

    def test_wrong_pattern(self):
        truth = ConfluentPronySolution([0.2, 0.8], ([1.0], [0.5, -2.0]))
        m = confluent_moments(truth, 6).real
        with pytest.raises(MultiplicityMismatch):
            solve_confluent_prony(m, (2, 1))


def test_symmetrize_snaps_pairs():
    x = np.array([0.3 + 0.2j + 1e-9, 0.3 - 0.2j, 0.5 + 1e-9j])
    y = symmetrize_conjugates(x)
    assert y[2].imag == 0
    assert y[0] == np.conj(y[1])
