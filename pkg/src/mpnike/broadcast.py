"""Broadcast encryption: one ciphertext, decryptable by an authorized set.

The sender derives the NIKE group key of the authorized set (acting as
its lexicographically first member), hashes it into an AEAD transport
key, and encrypts the payload with AES-256-GCM.  The header (format
version, parameter digest, sorted public-key list) doubles as the AEAD
associated data, so tampering with the recipient set breaks the tag.

Wire format (also in README): the magic bytes "MPNIKEBC" followed by
length-prefixed sections, each a 4-byte big-endian length plus payload:
version (2 bytes), parameter digest, member count (4 bytes), one section
per authorized public key (minimal big-endian), nonce, AEAD ciphertext.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESGCM

from . import kgc, nike, params
from .errors import (
    AuthFailure,
    FormatError,
    GroupTooSmall,
    NotAuthorized,
    ParamsMismatch,
    UnknownUser,
)
from .kgc import KeyPair, Keystore
from .numt import Rng
from .params import MasterSecret, PublicParams, SecurityLevel

MAGIC = b"MPNIKEBC"
FORMAT_VERSION = 1
TRANSPORT_TAG = b"MPNIKE-BC1"
NONCE_LEN = 12
TRANSPORT_KEY_LEN = 32


@dataclass(frozen=True)
class BroadcastCiphertext:
    """Sealed payload plus the metadata receivers need to open it."""

    params_ref: str
    authorized: tuple[int, ...]
    nonce: bytes
    ct: bytes = field(repr=False)


def brod_setup(
    eta: int,
    level: SecurityLevel,
    rng: Rng,
    forced_primes: tuple[int, int, int] | None = None,
) -> tuple[PublicParams, MasterSecret, Keystore]:
    """Provision parameters plus eta enrolled users (user001, user002, ...)."""
    if eta < 2:
        raise GroupTooSmall("a broadcast system needs at least two users")
    pp, msk = params.setup(level, rng, forced_primes)
    store = kgc.new_keystore(pp)
    for i in range(1, eta + 1):
        kgc.keygen(pp, msk, store, f"user{i:03d}", rng)
    return pp, msk, store


def _transport_key(pp: PublicParams, group_key: bytes) -> bytes:
    out = b""
    counter = 0
    while len(out) < TRANSPORT_KEY_LEN:
        out += hashlib.new(
            pp.hash_id, TRANSPORT_TAG + bytes([counter]) + group_key
        ).digest()
        counter += 1
    return out[:TRANSPORT_KEY_LEN]


def _section(payload: bytes) -> bytes:
    return len(payload).to_bytes(4, "big") + payload


def _header_bytes(params_ref: str, authorized: tuple[int, ...]) -> bytes:
    """Serialized header sections; used verbatim as AEAD associated data."""
    parts = [
        _section(FORMAT_VERSION.to_bytes(2, "big")),
        _section(bytes.fromhex(params_ref)),
        _section(len(authorized).to_bytes(4, "big")),
    ]
    for e in authorized:
        parts.append(_section(e.to_bytes((e.bit_length() + 7) // 8, "big")))
    return b"".join(parts)


def brod_encrypt(
    store: Keystore,
    pp: PublicParams,
    authorized_ids: Iterable[str],
    message: bytes,
    rng: Rng,
) -> BroadcastCiphertext:
    """Encrypt message so exactly the named users can decrypt.

    The group key is derived from the lexicographically first authorized
    user's key pair; any member's view produces the same key.
    """
    ids = sorted(set(authorized_ids))
    for user_id in ids:
        if user_id not in store.records:
            raise UnknownUser(user_id)
    if len(ids) < 2:
        raise GroupTooSmall("need at least two authorized users")
    digest = params.params_digest(pp)
    if store.params_ref != digest:
        raise ParamsMismatch("keystore belongs to different parameters")
    sender = store.pair(ids[0])
    others = [store.records[u].e for u in ids[1:]]
    state = nike.shared_key(pp, sender, others)
    key = _transport_key(pp, state.K)
    nonce = rng.randbytes(NONCE_LEN)
    aad = _header_bytes(digest, state.members)
    ct = AESGCM(key).encrypt(nonce, message, aad)
    return BroadcastCiphertext(
        params_ref=digest, authorized=state.members, nonce=nonce, ct=ct
    )


def brod_decrypt(pp: PublicParams, my_pair: KeyPair, bc: BroadcastCiphertext) -> bytes:
    digest = params.params_digest(pp)
    if bc.params_ref != digest:
        raise ParamsMismatch("ciphertext bound to different parameters")
    if my_pair.e not in bc.authorized:
        raise NotAuthorized(f"public key {my_pair.e} is not in the authorized set")
    others = [e for e in bc.authorized if e != my_pair.e]
    state = nike.shared_key(pp, my_pair, others)
    key = _transport_key(pp, state.K)
    aad = _header_bytes(bc.params_ref, bc.authorized)
    try:
        return AESGCM(key).decrypt(bc.nonce, bc.ct, aad)
    except InvalidTag:
        raise AuthFailure("broadcast ciphertext failed authentication") from None


def ct_to_bytes(bc: BroadcastCiphertext) -> bytes:
    return (
        MAGIC
        + _header_bytes(bc.params_ref, bc.authorized)
        + _section(bc.nonce)
        + _section(bc.ct)
    )


def ct_from_bytes(data: bytes) -> BroadcastCiphertext:
    if data[: len(MAGIC)] != MAGIC:
        raise FormatError("bad magic bytes")
    offset = len(MAGIC)

    def take() -> bytes:
        nonlocal offset
        if offset + 4 > len(data):
            raise FormatError("truncated section length")
        n = int.from_bytes(data[offset : offset + 4], "big")
        offset += 4
        if offset + n > len(data):
            raise FormatError("truncated section payload")
        payload = data[offset : offset + n]
        offset += n
        return payload

    version_raw = take()
    if len(version_raw) != 2 or int.from_bytes(version_raw, "big") != FORMAT_VERSION:
        raise FormatError(f"unsupported format version {version_raw.hex()}")
    params_ref = take().hex()
    count = int.from_bytes(take(), "big")
    authorized = []
    for _ in range(count):
        raw = take()
        if not raw or raw[0] == 0:
            raise FormatError("public key not in minimal big-endian form")
        authorized.append(int.from_bytes(raw, "big"))
    if sorted(set(authorized)) != authorized:
        raise FormatError("authorized set not sorted and distinct")
    nonce = take()
    if len(nonce) != NONCE_LEN:
        raise FormatError(f"nonce must be {NONCE_LEN} bytes")
    ct = take()
    if offset != len(data):
        raise FormatError("trailing bytes after final section")
    return BroadcastCiphertext(
        params_ref=params_ref, authorized=tuple(authorized), nonce=nonce, ct=ct
    )


def ct_save(bc: BroadcastCiphertext, path: str):
    with open(path, "wb") as fh:
        fh.write(ct_to_bytes(bc))


def ct_load(path: str) -> BroadcastCiphertext:
    with open(path, "rb") as fh:
        return ct_from_bytes(fh.read())
