import numpy as np

from latentbias.seeds import DOMAIN_FIT, DOMAIN_RANK, derive_rng, seed_sequence


def test_same_key_same_stream():
    a = derive_rng(42, DOMAIN_FIT, 0).random(8)
    b = derive_rng(42, DOMAIN_FIT, 0).random(8)
    assert np.array_equal(a, b)


def test_different_keys_different_streams():
    a = derive_rng(42, DOMAIN_FIT, 0).random(8)
    b = derive_rng(42, DOMAIN_FIT, 1).random(8)
    c = derive_rng(42, DOMAIN_RANK, 0).random(8)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_root_seed_changes_everything():
    a = seed_sequence(1, DOMAIN_FIT, 0).generate_state(2)
    b = seed_sequence(2, DOMAIN_FIT, 0).generate_state(2)
    assert not np.array_equal(a, b)
