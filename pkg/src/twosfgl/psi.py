"""Private set intersection over vertex identifiers.

Two backends:

* ``plain`` — a trusted-oracle set intersection, used as the reference in
  tests and for trusted-setup simulation runs.
* ``ddh``   — a classic two-round blind-exponentiation protocol in a
  prime-order subgroup of Z_p*.  Each party hashes its ids into the group,
  blinds them with a secret exponent, and exchanges them; the peer re-blinds
  with its own secret.  Double-blinded values H(x)^(ab) coincide exactly for
  common ids, so each party learns which of its own ids are shared and
  nothing else (honest-but-curious model).

The hash-to-group map raises a fixed generator to a digest-derived exponent.
That is adequate for a simulator but NOT production-grade: discrete-log
relations between hashed points are known to anyone who knows the map.
"""

import hashlib
import secrets as _secrets
from dataclasses import dataclass, field

from .seeding import derive_seed

__all__ = [
    "PsiBackend",
    "PsiTranscript",
    "PsiResult",
    "PsiProtocolError",
    "psi_plain",
    "psi_ddh",
    "encode_id",
]

# RFC 3526 2048-bit MODP group; (p-1)/2 is prime.  g=4 generates the
# prime-order subgroup of quadratic residues.
_MODP_2048_P = int(
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
    "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
    "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05"
    "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB"
    "9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF695581718"
    "3995497CEA956AE515D2261898FA051015728E5A8AACAA68FFFFFFFFFFFFFFFF", 16)

# 62-bit safe prime for tests: p = 2q + 1 with q prime.
_TEST_P = 4611686018427377339
_TEST_Q = 2305843009213688669


class PsiProtocolError(RuntimeError):
    """Protocol abort: a received message violates the group contract."""


@dataclass(frozen=True)
class PsiBackend:
    """Group parameters for the intersection protocol.

    ``kind`` selects plain (oracle) or ddh.  For ddh, ``modulus`` is the
    prime p, ``generator`` generates the subgroup of prime ``order`` q with
    q | p-1.  ``hash_name`` identifies the digest used by hash-to-group.
    """

    kind: str = "plain"
    modulus: int = _MODP_2048_P
    generator: int = 4
    order: int = (_MODP_2048_P - 1) // 2
    hash_name: str = "sha256"

    def __post_init__(self):
        if self.kind not in ("plain", "ddh"):
            raise ValueError(f"unknown PSI backend kind {self.kind!r}")

    @classmethod
    def plain(cls) -> "PsiBackend":
        return cls(kind="plain")

    @classmethod
    def ddh(cls) -> "PsiBackend":
        """2048-bit group; order >= 2^255 as recommended for real use."""
        return cls(kind="ddh")

    @classmethod
    def ddh_small(cls) -> "PsiBackend":
        """62-bit test group: fast, functionally identical protocol."""
        return cls(kind="ddh", modulus=_TEST_P, generator=4, order=_TEST_Q)

    @property
    def element_bytes(self) -> int:
        return (self.modulus.bit_length() + 7) // 8

    def hash_to_group(self, ident: int) -> int:
        digest = hashlib.new(self.hash_name, encode_id(ident)).digest()
        exponent = int.from_bytes(digest, "big") % self.order
        return pow(self.generator, exponent, self.modulus)

    def in_subgroup(self, element: int) -> bool:
        return 1 <= element < self.modulus and pow(element, self.order, self.modulus) == 1

    def random_secret(self, seed=None) -> int:
        if seed is None:
            return 1 + _secrets.randbelow(self.order - 1)
        rng_val = derive_seed(seed, "psi-secret")
        # fold a 64-bit derived seed into [1, q-1]
        return 1 + (rng_val % (self.order - 1))


def encode_id(ident: int) -> bytes:
    """Canonical byte encoding of a vertex id (8-byte big-endian)."""
    return int(ident).to_bytes(8, "big", signed=False)


@dataclass
class PsiTranscript:
    """Append-only record of every message, for audit and privacy tests."""

    records: list = field(default_factory=list)  # (sender, payload bytes)

    def append(self, sender: str, payload: bytes) -> None:
        self.records.append((sender, payload))

    def payload_bytes(self) -> bytes:
        return b"".join(payload for _, payload in self.records)

    def dump(self) -> str:
        """Newline-delimited ``sender,hex(payload)`` records."""
        return "\n".join(f"{sender},{payload.hex()}" for sender, payload in self.records)


@dataclass(frozen=True)
class PsiResult:
    intersection_a: frozenset
    intersection_b: frozenset
    transcript: PsiTranscript


def psi_plain(set_a, set_b) -> set:
    """Trusted-oracle intersection."""
    return set(set_a) & set(set_b)


def _pack(backend: PsiBackend, elements) -> bytes:
    size = backend.element_bytes
    return b"".join(e.to_bytes(size, "big") for e in elements)


def _check_received(backend: PsiBackend, elements, what: str) -> None:
    for e in elements:
        if not backend.in_subgroup(e):
            raise PsiProtocolError(f"{what}: element not in the prime-order subgroup")
    if len(set(elements)) != len(elements):
        raise PsiProtocolError(
            f"{what}: duplicate blinded values (hash collision; "
            f"group order {backend.order} is too small for this id set)")


def psi_ddh(ids_a, ids_b, backend: PsiBackend | None = None,
            secret_a: int | None = None, secret_b: int | None = None,
            seed: int | None = None,
            name_a: str = "A", name_b: str = "B") -> PsiResult:
    """Run the two-round blind-exponentiation intersection protocol.

    Round 1: each party sends its blinded ids {H(x)^secret}.  Round 2: each
    party re-blinds the peer's list (order preserved) and returns it.  A
    party then matches its own double-blinded ids against the set it
    computed from the peer's list.

    Both in-memory parties are simulated here; every message is appended to
    the transcript exactly as it would cross the wire.
    """
    if backend is None:
        backend = PsiBackend.ddh_small()
    if backend.kind != "ddh":
        raise ValueError("psi_ddh requires a ddh backend")
    if secret_a is None:
        secret_a = backend.random_secret(None if seed is None else derive_seed(seed, name_a))
    if secret_b is None:
        secret_b = backend.random_secret(None if seed is None else derive_seed(seed, name_b))
    for s in (secret_a, secret_b):
        if not 1 <= s < backend.order:
            raise ValueError("secrets must lie in [1, order - 1]")

    p = backend.modulus
    ids_a = sorted(ids_a)
    ids_b = sorted(ids_b)
    transcript = PsiTranscript()

    # round 1: blinded own sets
    blinded_a = [pow(backend.hash_to_group(x), secret_a, p) for x in ids_a]
    blinded_b = [pow(backend.hash_to_group(y), secret_b, p) for y in ids_b]
    _check_received(backend, blinded_a, f"{name_b} receiving from {name_a}")
    _check_received(backend, blinded_b, f"{name_a} receiving from {name_b}")
    transcript.append(name_a, _pack(backend, blinded_a))
    transcript.append(name_b, _pack(backend, blinded_b))

    # round 2: peer re-blinds, order preserved
    double_a = [pow(e, secret_b, p) for e in blinded_a]   # computed by B
    double_b = [pow(e, secret_a, p) for e in blinded_b]   # computed by A
    _check_received(backend, double_a, f"{name_a} receiving re-blinded list")
    _check_received(backend, double_b, f"{name_b} receiving re-blinded list")
    transcript.append(name_b, _pack(backend, double_a))
    transcript.append(name_a, _pack(backend, double_b))

    double_b_set = set(double_b)
    double_a_set = set(double_a)
    inter_a = frozenset(x for x, d in zip(ids_a, double_a) if d in double_b_set)
    inter_b = frozenset(y for y, d in zip(ids_b, double_b) if d in double_a_set)
    return PsiResult(intersection_a=inter_a, intersection_b=inter_b,
                     transcript=transcript)
