import numpy as np
import pytest

from twosfgl.psi import (PsiBackend, PsiProtocolError, _check_received,
                         encode_id, psi_ddh, psi_plain)


def small():
    return PsiBackend.ddh_small()


def test_plain_is_set_intersection():
    assert psi_plain({1, 2, 3}, {2, 3, 4}) == {2, 3}
    assert psi_plain(set(), {1}) == set()
    assert psi_plain(range(5), [3, 4, 5]) == {3, 4}


def test_ddh_matches_plain_on_random_sets():
    rng = np.random.default_rng(23)
    backend = small()
    for trial in range(25):
        universe = rng.choice(10**6, size=60, replace=False)
        a = set(int(x) for x in universe[: rng.integers(0, 40)])
        b = set(int(x) for x in universe[20: 20 + rng.integers(0, 40)])
        expected = psi_plain(a, b)
        res = psi_ddh(a, b, backend, seed=trial)
        assert set(res.intersection_a) == expected
        assert set(res.intersection_b) == expected


def test_ddh_disjoint_and_identical_sets():
    backend = small()
    res = psi_ddh({1, 2}, {3, 4}, backend, seed=0)
    assert res.intersection_a == frozenset()
    res = psi_ddh({5, 6, 7}, {5, 6, 7}, backend, seed=0)
    assert res.intersection_a == frozenset({5, 6, 7})


def test_ddh_empty_side():
    res = psi_ddh(set(), {1, 2}, small(), seed=1)
    assert res.intersection_a == frozenset()
    assert res.intersection_b == frozenset()


def test_ddh_deterministic_transcript_per_seed():
    a, b = {10, 20, 30}, {20, 40}
    r1 = psi_ddh(a, b, small(), seed=9)
    r2 = psi_ddh(a, b, small(), seed=9)
    assert r1.transcript.payload_bytes() == r2.transcript.payload_bytes()
    r3 = psi_ddh(a, b, small(), seed=10)
    assert r1.transcript.payload_bytes() != r3.transcript.payload_bytes()


def test_ddh_unseeded_secrets_still_correct():
    res = psi_ddh({1, 2, 3}, {2, 3, 4}, small())
    assert res.intersection_a == frozenset({2, 3})


def test_ddh_explicit_secrets():
    res = psi_ddh({1, 2}, {2, 9}, small(), secret_a=12345, secret_b=67890)
    assert res.intersection_a == frozenset({2})
    with pytest.raises(ValueError, match="secrets"):
        psi_ddh({1}, {1}, small(), secret_a=0, secret_b=5)
    with pytest.raises(ValueError, match="secrets"):
        psi_ddh({1}, {1}, small(), secret_a=5, secret_b=small().order)


def test_ddh_requires_ddh_backend():
    with pytest.raises(ValueError, match="requires a ddh backend"):
        psi_ddh({1}, {1}, PsiBackend.plain())


def test_backend_kind_validated():
    with pytest.raises(ValueError, match="unknown PSI backend"):
        PsiBackend(kind="quantum")


def test_transcript_structure():
    backend = small()
    a, b = {1, 2, 3}, {2, 3}
    res = psi_ddh(a, b, backend, seed=4, name_a="east", name_b="west")
    senders = [s for s, _ in res.transcript.records]
    assert senders == ["east", "west", "west", "east"]
    sizes = [len(p) for _, p in res.transcript.records]
    eb = backend.element_bytes
    assert sizes == [3 * eb, 2 * eb, 3 * eb, 2 * eb]
    dump = res.transcript.dump()
    assert dump.count("\n") == 3
    assert dump.startswith("east,")


def test_transcript_never_contains_raw_ids():
    backend = small()
    ids_a = {3, 1_000_001, 77_777_777}
    ids_b = {3, 42, 77_777_777}
    res = psi_ddh(ids_a, ids_b, backend, seed=5)
    payload = res.transcript.payload_bytes()
    for ident in ids_a | ids_b:
        assert encode_id(ident) not in payload


def test_hash_to_group_lands_in_subgroup():
    backend = small()
    for ident in (0, 1, 7, 2**40, 999_999_999):
        e = backend.hash_to_group(ident)
        assert backend.in_subgroup(e)


def test_in_subgroup_rejects_bad_elements():
    backend = small()
    p = backend.modulus
    assert not backend.in_subgroup(0)
    assert not backend.in_subgroup(p)
    # p-1 has order 2, not q
    assert not backend.in_subgroup(p - 1)
    assert backend.in_subgroup(1)
    assert backend.in_subgroup(pow(backend.generator, 12345, p))


def test_check_received_aborts_on_subgroup_violation():
    backend = small()
    good = backend.hash_to_group(5)
    with pytest.raises(PsiProtocolError, match="prime-order subgroup"):
        _check_received(backend, [good, backend.modulus - 1], "peer list")


def test_check_received_aborts_on_duplicates():
    backend = small()
    e = backend.hash_to_group(5)
    with pytest.raises(PsiProtocolError, match="duplicate blinded"):
        _check_received(backend, [e, e], "peer list")


def test_encode_id_fixed_width_big_endian():
    assert encode_id(0) == b"\x00" * 8
    assert encode_id(1) == b"\x00" * 7 + b"\x01"
    assert encode_id(2**32) == b"\x00\x00\x00\x01\x00\x00\x00\x00"
    with pytest.raises(OverflowError):
        encode_id(2**64)


def test_default_backend_group_sizes():
    assert PsiBackend.ddh().modulus.bit_length() == 2048
    assert PsiBackend.ddh().order.bit_length() >= 255
    s = small()
    assert s.modulus == 2 * s.order + 1
    assert s.element_bytes == 8


def test_random_secret_seeded_is_deterministic():
    backend = small()
    assert backend.random_secret(7) == backend.random_secret(7)
    assert 1 <= backend.random_secret(7) < backend.order
    assert backend.random_secret(7) != backend.random_secret(8)
