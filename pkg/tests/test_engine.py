import numpy as np
import pytest

from junkfilter import linalg
from junkfilter.circuit import build_ladder_circuit, circuit_prefix
from junkfilter.engine import run, run_twirled, sample_shots, simulate
from junkfilter.noise import (
    Channel,
    DampingRates,
    NoiseSpec,
    NoisyProgram,
    TwirlConfig,
    Unitary,
    attach_noise,
    depolarizing_channel,
    pauli_twirl_cz,
)
from junkfilter.rng import stream
from junkfilter.subspace import build_subspace

DAMPING = NoiseSpec(single_qubit=DampingRates(amp=0.004, phase=0.01), two_qubit=DampingRates(amp=0.02, phase=0.03))


def dense_reference(program: NoisyProgram, initial: int) -> np.ndarray:
    """Full-dimension operator products, one instruction at a time, with no fusion."""
    n = program.n_qubits
    rho = linalg.basis_density_matrix(initial, n)
    for ins in program.instructions:
        if isinstance(ins, Unitary):
            u = linalg.embed_operator(ins.matrix, ins.targets, n)
            rho = u @ rho @ u.conj().T
        else:
            ks = [linalg.embed_operator(k, ins.targets, n) for k in ins.channel.kraus]
            rho = sum(k @ rho @ k.conj().T for k in ks)
    return rho


def test_empty_program_is_delta():
    res = run(NoisyProgram(4, ()), 0b0011)
    assert np.array_equal(res.exact_pops, np.eye(16)[3])


@pytest.mark.parametrize("spec", [NoiseSpec(identity_depolarizing=0.03), DAMPING,
                                  NoiseSpec(identity_depolarizing=0.01, two_qubit=DampingRates(amp=0.05))])
@pytest.mark.parametrize("slots", ["layer", "step"])
def test_fused_engine_matches_dense_reference(spec, slots):
    c = build_ladder_circuit(3, 3, seed=12, identity_slots=slots)
    prog = attach_noise(c, spec)
    res = run(prog, 0b011, keep_rho=True)
    assert np.allclose(res.final_rho, dense_reference(prog, 0b011), atol=1e-12)
    assert np.array_equal(res.exact_pops, linalg.diagonal(res.final_rho))


def test_noiseless_ladder_conserves_excitations():
    idx = build_subspace(4, 2)
    for depth in (1, 10, 50):
        pops = run(attach_noise(build_ladder_circuit(4, depth, seed=depth), NoiseSpec()), 0b0011).exact_pops
        assert pops[list(idx.junk)].sum() < 1e-10


def test_full_depolarization_gives_uniform():
    c = build_ladder_circuit(3, 1, seed=0)
    pops = run(attach_noise(c, NoiseSpec(identity_depolarizing=1.0)), 0b011).exact_pops
    # the identity slots replace every qubit by I/2 before the (unital) Givens rotations
    assert np.allclose(pops, np.full(8, 1 / 8), atol=1e-14)


def test_checkpoints_equal_independent_prefix_runs():
    c = build_ladder_circuit(4, 12, seed=5, identity_slots="step")
    spec = NoiseSpec(identity_depolarizing=0.01)
    cps = run(attach_noise(c, spec), 3, checkpoints=(0, 1, 5, 12)).checkpoints
    for n in (0, 1, 5, 12):
        direct = run(attach_noise(circuit_prefix(c, n), spec), 3).exact_pops
        assert np.array_equal(cps[n], direct)


def test_checkpoint_beyond_depth():
    c = build_ladder_circuit(2, 2, seed=0)
    with pytest.raises(ValueError):
        run(attach_noise(c, NoiseSpec()), 1, checkpoints=(3,))


def test_malformed_program():
    with pytest.raises(TypeError):
        run(NoisyProgram(2, ("cz",)), 0)
    with pytest.raises(ValueError):
        run(NoisyProgram(2, (Channel(depolarizing_channel(0.1), (2,), 0),)), 0)


@pytest.mark.parametrize("spec", [NoiseSpec(identity_depolarizing=0.01), DAMPING])
def test_deep_trace_and_state_validity(spec):
    c = build_ladder_circuit(4, 200, seed=3)
    rho = run(attach_noise(c, spec), 3, keep_rho=True).final_rho
    assert abs(np.trace(rho) - 1) < 1e-9
    assert linalg.is_density_matrix(rho)


def test_purity_non_increasing_under_depolarizing():
    c = build_ladder_circuit(3, 10, seed=8)
    spec = NoiseSpec(identity_depolarizing=0.02)
    purities = []
    for n in range(11):
        rho = run(attach_noise(circuit_prefix(c, n), spec), 0b001, keep_rho=True).final_rho
        purities.append(np.trace(rho @ rho).real)
    assert all(b <= a + 1e-12 for a, b in zip(purities, purities[1:]))


def test_approach_to_maximally_mixed():
    spec = NoiseSpec(identity_depolarizing=0.005)
    depths = (20, 40, 80, 160)
    tv = np.zeros(len(depths))
    for seed in range(5):
        cps = run(attach_noise(build_ladder_circuit(4, 160, seed=seed), spec), 3, checkpoints=depths).checkpoints
        tv += [0.5 * np.abs(cps[n] - 1 / 16).sum() for n in depths]
    assert all(np.diff(tv) < 0)


def test_run_is_bit_identical():
    c = build_ladder_circuit(4, 30, seed=1)
    a = run(attach_noise(c, DAMPING), 3).exact_pops
    b = run(attach_noise(c, DAMPING), 3).exact_pops
    assert np.array_equal(a, b)


class TestTwirled:
    def test_requires_enabled(self):
        with pytest.raises(ValueError):
            run_twirled(build_ladder_circuit(2, 1, seed=0), DAMPING, 1)

    def test_single_instance_equals_one_draw(self):
        c = build_ladder_circuit(3, 4, seed=2)
        spec = DAMPING.model_copy(update={"twirl": TwirlConfig(enabled=True, n_instances=1, seed=99)})
        res = run_twirled(c, spec, 0b011)
        base = attach_noise(c, spec, compose_givens=False)
        one = run(pauli_twirl_cz(base, stream(99, 0)), 0b011)
        assert np.array_equal(res.exact_pops, one.exact_pops)
        assert res.twirl_instances_used == 1

    def test_noiseless_twirl_equals_untwirled(self):
        c = build_ladder_circuit(3, 4, seed=2)
        spec = NoiseSpec(twirl=TwirlConfig(enabled=True, n_instances=5))
        assert np.allclose(simulate(c, spec, 0b011).exact_pops, run(attach_noise(c, NoiseSpec()), 0b011).exact_pops,
                           atol=1e-10)

    def test_checkpoints_are_instance_averages(self):
        c = build_ladder_circuit(3, 4, seed=4)
        spec = DAMPING.model_copy(update={"twirl": TwirlConfig(enabled=True, n_instances=3, seed=1)})
        res = run_twirled(c, spec, 0b011, checkpoints=(2, 4))
        assert np.allclose(res.checkpoints[4], res.exact_pops, atol=1e-15)
        assert res.twirl_instances_used == 3
        base = attach_noise(c, spec, compose_givens=False)
        manual = np.mean([run(pauli_twirl_cz(base, stream(1, k)), 0b011, checkpoints=(2,)).checkpoints[2]
                          for k in range(3)], axis=0)
        assert np.allclose(res.checkpoints[2], manual, atol=1e-15)


class TestShots:
    def test_delta(self):
        p = np.eye(16)[5]
        assert np.array_equal(sample_shots(p, 123, stream(0)), p)

    def test_deterministic_and_normalised(self):
        p = np.random.default_rng(0).dirichlet(np.ones(16))
        a = sample_shots(p, 1000, stream(7))
        assert np.array_equal(a, sample_shots(p, 1000, stream(7)))
        assert a.sum() == 1.0
        assert np.allclose(a * 1000, np.round(a * 1000))

    @pytest.mark.parametrize("seed", range(5))
    def test_concentration(self, seed):
        p = np.random.default_rng(seed).dirichlet(np.ones(16))
        s = sample_shots(p, 10**6, stream(seed, 1))
        assert 0.5 * np.abs(s - p).sum() < 0.01

    def test_matches_multinomial_law(self):
        # chi-square against the exact distribution over many draws
        p = np.array([0.5, 0.25, 0.125, 0.125])
        s = sample_shots(p, 200_000, stream(3)) * 200_000
        chi2 = ((s - 200_000 * p) ** 2 / (200_000 * p)).sum()
        assert chi2 < 16.3  # 99.9% quantile, 3 degrees of freedom

    def test_rejects_zero_shots(self):
        with pytest.raises(ValueError):
            sample_shots(np.ones(4) / 4, 0, stream(0))
