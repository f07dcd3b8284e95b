import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import all_challenges, phi_oracle, response_oracle
from pufattack.errors import ContractError, DisjointnessError
from pufattack.puf import (
    CrpSet,
    PufInstance,
    apuf_response,
    chain_dots,
    generate_crp_set,
    sample_challenges,
    sample_puf_instance,
    transform_challenge,
    transform_challenges,
    xor_apuf_response,
)

bits = st.lists(st.integers(0, 1), min_size=1, max_size=40)


# -- feature transform ---------------------------------------------------------


def test_transform_hand_examples():
    assert transform_challenge([1, 0]).tolist() == [-1, 1, 1]
    assert transform_challenge([1, 1, 1]).tolist() == [-1, 1, -1, 1]
    assert transform_challenge([0, 0, 0, 0]).tolist() == [1, 1, 1, 1, 1]


@pytest.mark.parametrize("n", range(1, 13))
def test_transform_matches_product_oracle_exhaustively(n):
    C = all_challenges(n)
    expected = np.array([phi_oracle(c) for c in C])
    assert np.array_equal(transform_challenges(C), expected)


@given(bits)
def test_transform_entries_are_signs_and_last_is_one(c):
    phi = transform_challenge(c)
    assert phi.shape == (len(c) + 1,)
    assert set(np.unique(phi)) <= {-1.0, 1.0}
    assert phi[-1] == 1.0


def test_transform_rejects_bad_input():
    with pytest.raises(ContractError):
        transform_challenges(np.array([[0, 2]]))
    with pytest.raises(ContractError):
        transform_challenge(np.zeros((2, 2)))
    with pytest.raises(ContractError):
        transform_challenges(np.zeros((3, 0)))


# -- single-chain and XOR responses ---------------------------------------------


def test_apuf_response_examples():
    assert apuf_response([0.5, -0.25, 0.1], [1, 1, 1]) == 0
    assert apuf_response([1, 0, 0], [-1, 1, 1]) == 1
    assert apuf_response([0, 0, 0], [-1, 1, -1]) == 0


def test_apuf_response_length_mismatch():
    with pytest.raises(ContractError):
        apuf_response([1.0, 2.0], [1.0, 1.0, 1.0])


@given(st.lists(st.floats(-10, 10), min_size=2, max_size=20), st.data())
def test_apuf_sign_antisymmetry(w, data):
    w = np.array(w)
    c = data.draw(st.lists(st.integers(0, 1), min_size=len(w) - 1, max_size=len(w) - 1))
    phi = transform_challenge(c)
    if w @ phi != 0:
        assert apuf_response(w, phi) == 1 - apuf_response(-w, phi)


def _instance(chains, seed=0):
    chains = np.atleast_2d(np.asarray(chains, dtype=np.float64))
    return PufInstance(n=chains.shape[1] - 1, k=chains.shape[0], seed=seed, chains=chains)


@pytest.mark.parametrize(
    "signs, expected",
    [((1, 0, 1, 1), 1), ((1, 1), 0), ((1,), 1), ((0,), 0)],
)
def test_xor_parity(signs, expected):
    # n=1, phi=(+1,+1): chain j answers 1 exactly when its first weight is negative
    inst = _instance([[-1.0 if s else 1.0, 0.0] for s in signs])
    assert xor_apuf_response(inst, [1.0, 1.0]) == expected


def test_xor_k1_equals_single_chain():
    inst = sample_puf_instance(12, 1, 5)
    for c in all_challenges(12)[::37]:
        phi = transform_challenge(c)
        assert xor_apuf_response(inst, phi) == apuf_response(inst.chains[0], phi)


def test_xor_identical_chains_is_zero():
    w = np.random.default_rng(1).standard_normal(9)
    inst = _instance([w, w])
    phi = transform_challenges(all_challenges(8))
    assert not inst.responses(phi).any()


def test_xor_response_dimension_mismatch():
    inst = sample_puf_instance(8, 2, 0)
    with pytest.raises(ContractError):
        xor_apuf_response(inst, np.ones(8))


@pytest.mark.parametrize("n,k", [(4, 1), (6, 2), (5, 3)])
def test_responses_match_scalar_oracle(n, k):
    inst = sample_puf_instance(n, k, 100 + n)
    C = all_challenges(n)
    got = inst.responses(transform_challenges(C))
    assert got.tolist() == [response_oracle(inst.chains, c) for c in C]


def test_strict_dots_match_python_sum_order():
    rng = np.random.default_rng(3)
    w = rng.standard_normal((3, 17))
    phi = transform_challenges(rng.integers(0, 2, (50, 16)))
    strict = chain_dots(w, phi, strict=True)
    for a in range(3):
        for i in range(50):
            acc = 0.0
            for j in range(17):
                acc += w[a, j] * phi[i, j]
            assert strict[a, i] == acc


# -- instances -------------------------------------------------------------------


def test_instance_determinism_and_shape():
    a = sample_puf_instance(16, 1, 42)
    b = sample_puf_instance(16, 1, 42)
    assert a == b and a.chains.tobytes() == b.chains.tobytes()
    assert sample_puf_instance(64, 4, 42).chains.shape == (4, 65)
    assert sample_puf_instance(16, 1, 43) != a


def test_instance_moments():
    x = sample_puf_instance(999_999, 1, 2024).chains.ravel()
    assert x.size == 1_000_000
    assert abs(x.mean()) < 0.01
    assert abs(x.var() - 1) < 0.01


def test_instance_is_immutable():
    inst = sample_puf_instance(8, 2, 0)
    with pytest.raises(ValueError):
        inst.chains[0, 0] = 1.0
    flat = inst.flatten()
    flat[0] = 99.0
    assert inst.chains[0, 0] != 99.0


def test_instance_validation():
    with pytest.raises(ContractError):
        sample_puf_instance(0, 1, 0)
    with pytest.raises(ContractError):
        PufInstance(n=3, k=1, seed=0, chains=np.zeros((1, 3)))
    with pytest.raises(ContractError):
        PufInstance(n=1, k=1, seed=0, chains=[[np.nan, 1.0]])
    with pytest.raises(ValueError):
        sample_puf_instance(4, 1, -1)


# -- CRP sets --------------------------------------------------------------------


def test_crpset_sizes_and_determinism():
    inst = sample_puf_instance(16, 1, 7)
    t = generate_crp_set(inst, 1000, "test", seed=3)
    assert len(t) == 1000 and t.role == "test"
    assert generate_crp_set(inst, 1000, "test", seed=3) == t
    assert generate_crp_set(inst, 1000, "test", seed=4) != t


def test_learning_challenges_are_reproducible_without_responses():
    inst = sample_puf_instance(20, 2, 1)
    s = generate_crp_set(inst, 500, "learning", seed=11)
    assert np.array_equal(sample_challenges(20, 500, 11), s.challenges)


def test_with_replacement_beyond_challenge_space():
    inst = sample_puf_instance(16, 1, 0)
    big = generate_crp_set(inst, 250_000, "learning", seed=1)
    assert len(big) == 250_000
    assert len(np.unique(np.packbits(big.challenges, axis=1), axis=0)) < 2**16


@pytest.mark.parametrize("n,k", [(8, 1), (16, 4), (33, 2)])
def test_generated_set_reverifies(n, k):
    inst = sample_puf_instance(n, k, n)
    s = generate_crp_set(inst, 2000, "learning", seed=5)
    assert s.verify(inst) == 0
    other = sample_puf_instance(n, k, n + 1)
    assert s.verify(other) > 0


def test_test_set_avoids_forbidden():
    inst = sample_puf_instance(12, 1, 0)
    learn = generate_crp_set(inst, 1000, "learning", seed=1)
    test = generate_crp_set(inst, 500, "test", seed=2, forbidden=learn)
    assert not test.overlap_allowed
    lk = {r.tobytes() for r in learn.challenges}
    assert all(r.tobytes() not in lk for r in test.challenges)


def test_test_set_overlap_flag_when_space_too_small():
    inst = sample_puf_instance(8, 1, 0)
    learn = generate_crp_set(inst, 1000, "learning", seed=1)
    test = generate_crp_set(inst, 100, "test", seed=2, forbidden=learn)
    assert test.overlap_allowed
    with pytest.raises(DisjointnessError):
        generate_crp_set(inst, 100, "test", seed=2, forbidden=learn, require_disjoint=True)


def test_challenge_frequencies_uniform():
    # n=8, 10**6 draws: each of 256 counts within 4 sigma of the multinomial mean
    C = sample_challenges(8, 1_000_000, 99)
    idx = np.packbits(C, axis=1)[:, 0]
    counts = np.bincount(idx, minlength=256)
    p = 1 / 256
    mean = 1_000_000 * p
    sd = np.sqrt(1_000_000 * p * (1 - p))
    assert np.all(np.abs(counts - mean) <= 4 * sd)


def test_crpset_validation():
    with pytest.raises(ContractError):
        CrpSet(n=2, k=1, instance_seed=0, role="train", sampling_seed=0, challenges=[[0, 1]], responses=[0])
    with pytest.raises(ContractError):
        CrpSet(n=2, k=1, instance_seed=0, role="test", sampling_seed=0, challenges=[[0, 1]], responses=[0, 1])
    with pytest.raises(ContractError):
        CrpSet(n=2, k=1, instance_seed=0, role="test", sampling_seed=0, challenges=[[0, 1]], responses=[2])
    inst = sample_puf_instance(4, 1, 0)
    with pytest.raises(ContractError):
        generate_crp_set(inst, 0)


def test_crpset_phi_precomputed_and_readonly():
    inst = sample_puf_instance(10, 1, 0)
    s = generate_crp_set(inst, 100, seed=0)
    assert np.array_equal(s.phi, transform_challenges(s.challenges))
    assert s.phi_t8.dtype == np.int8 and s.phi_t8.shape == (11, 100)
    with pytest.raises(ValueError):
        s.responses[0] = 1


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12), st.integers(1, 3), st.integers(0, 2**64 - 1))
def test_generated_responses_match_oracle(n, k, seed):
    inst = sample_puf_instance(n, k, seed)
    s = generate_crp_set(inst, 20, seed=seed)
    assert s.responses.tolist() == [response_oracle(inst.chains, c) for c in s.challenges]
