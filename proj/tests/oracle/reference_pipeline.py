#!/usr/bin/env python3
"""Independent reference for the golden vectors frozen in the C++ tests.

Uses hashlib and `cryptography` only and shares no code with the library. Run it and compare against
tests/unit/golden_test.cpp if any formula or the draw order changes.

Scenario s0: seed 00 01 .. 1f, sha256, delta 2, one sensor "sn-01", one user
"alice" / "correct horse" with biometric byte i = (37*i + 11) mod 256.
"""

import hashlib
import json
import sys

from cryptography.hazmat.primitives import hashes, serialization
from cryptography.hazmat.primitives.asymmetric.x25519 import X25519PrivateKey, X25519PublicKey
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.kdf.hkdf import HKDF


def H(*parts: bytes) -> bytes:
    return hashlib.sha256(b"".join(parts)).digest()


def xor(*blocks: bytes) -> bytes:
    out = bytearray(32)
    for b in blocks:
        assert len(b) == 32
        for i, v in enumerate(b):
            out[i] ^= v
    return bytes(out)


def be64(n: int) -> bytes:
    return n.to_bytes(8, "big")


class Rng:
    def __init__(self, seed: bytes):
        self.seed, self.counter = seed, 0

    def next(self) -> bytes:
        out = hashlib.sha256(b"akap-rng" + self.seed + be64(self.counter)).digest()
        self.counter += 1
        return out


def get_bit(data: bytes, i: int) -> int:
    return (data[i // 8] >> (7 - i % 8)) & 1


def encode_rep(sigma: bytes) -> bytes:
    bits = []
    for i in range(128):
        bits += [get_bit(sigma, i)] * 5
    out = bytearray(80)
    for i, b in enumerate(bits):
        if b:
            out[i // 8] |= 0x80 >> (i % 8)
    return bytes(out)


def rep(bio: bytes, tau: bytes) -> bytes:
    noisy = bytes(a ^ b for a, b in zip(bio, tau))
    sigma = bytearray(16)
    for i in range(128):
        if sum(get_bit(noisy, 5 * i + k) for k in range(5)) >= 3:
            sigma[i // 8] |= 0x80 >> (i % 8)
    return bytes(sigma)


def raw_pub(priv: X25519PrivateKey) -> bytes:
    return priv.public_key().public_bytes(serialization.Encoding.Raw, serialization.PublicFormat.Raw)


def pke_encrypt(pub: bytes, m: bytes) -> bytes:
    eph = X25519PrivateKey.from_private_bytes(hashlib.sha256(b"akap-pke-ephemeral" + pub + m).digest())
    eph_pub = raw_pub(eph)
    shared = eph.exchange(X25519PublicKey.from_public_bytes(pub))
    key = HKDF(algorithm=hashes.SHA256(), length=32, salt=eph_pub + pub, info=b"akap-pke-v1").derive(shared)
    return eph_pub + AESGCM(key).encrypt(bytes(12), m, None)


def frame(tag: int, *fields: bytes) -> bytes:
    return bytes([tag]) + b"".join(fields)


def var(b: bytes) -> bytes:
    return len(b).to_bytes(2, "big") + b


def pipeline() -> dict:
    seed = bytes(range(32))
    uid, pw, sid = b"alice", b"correct horse", b"sn-01"
    bio = bytes((37 * i + 11) % 256 for i in range(80))
    rng = Rng(seed)
    out = {}

    gj = rng.next()
    out["rng0"] = gj.hex()

    # Sensor registration (ticks 1, 2).
    sk_seed = rng.next()
    priv = X25519PrivateKey.from_private_bytes(sk_seed)
    pbs = raw_pub(priv)
    b = rng.next()
    pid = H(sid, b)
    hsid = H(sid, gj)
    sg = xor(H(hsid, gj), pid)
    L = pke_encrypt(pbs, pid)
    out["sensor_public_key"] = pbs.hex()
    out["pid"] = pid.hex()
    out["sg"] = sg.hex()
    out["L"] = L.hex()
    out["sensor_reg_request"] = frame(0x12, var(sid), var(pbs)).hex()

    # User registration (ticks 3, 4).
    r1 = rng.next()
    sigma = rng.next()[:16]
    tau = bytes(a ^ b for a, b in zip(encode_rep(sigma), bio))
    hid = H(uid, r1)
    hpw = H(pw, sigma)
    n = xor(H(b"PWB", pw), H(uid, sigma))
    d1 = H(hid, n)
    d2 = xor(H(d1, gj), hpw)
    d3 = xor(d2, n)
    d4 = xor(H(hid, gj), d1)
    omega = xor(n, r1)
    m = xor(H(n, r1), hid)
    out["user_reg_request"] = frame(0x10, hid, hpw, n).hex()
    out["user_reg_response"] = frame(0x11, d1, d3, d4).hex()
    out["card"] = {"d1": d1.hex(), "d3": d3.hex(), "d4": d4.hex(), "omega": omega.hex(), "m": m.hex(), "tau": tau.hex()}
    out["h_n_r1"] = H(n, r1).hex()

    # Session: M1 at tick 5, M2 at 6, M3 at 7, M4 at 8.
    t1, t2, t3, t4 = 5, 6, 7, 8
    s = rep(bio, tau)
    assert s == sigma
    n_ = xor(H(b"PWB", pw), H(uid, s))
    r1_ = xor(omega, n_)
    assert xor(H(n_, r1_), H(uid, r1_)) == m
    b1 = xor(d3, n_, H(pw, s))
    r_u = rng.next()
    b2 = xor(b1, r_u)
    x_ug = H(be64(t1), r_u, hid, b2)
    out["M1"] = frame(0x01, hid, b2, x_ug, be64(t1)).hex()

    assert H(d1, gj) == b1
    r_g = rng.next()
    b3 = xor(r_u, H(hsid, gj))
    b4 = xor(d1, H(b3, sid, r_u))
    b5 = xor(r_g, H(d1, r_u))
    b6 = xor(b3, pid)
    x_gs = H(be64(t2), r_u, r_g, sid, b5)
    out["M2"] = frame(0x02, b4, b5, b6, x_gs, be64(t2)).hex()

    r_s = rng.next()
    b7 = xor(r_s, H(sg, d1, r_g))
    b8 = xor(pid, b7)
    sk = H(r_u, r_g, r_s)
    x_sg = H(be64(t3), r_g, r_s, b7, sg)
    sid_block = H(b"SID", sid)
    x_su = H(r_u, r_s, sid_block, d1)
    out["M3"] = frame(0x03, b8, x_sg, x_su, be64(t3)).hex()

    b9 = xor(d1, b1)
    b10 = xor(b9, H(hid, gj), r_s)
    b11 = xor(sid_block, H(b1, r_s))
    x_gu = H(be64(t4), r_u, r_g, b10)
    out["M4"] = frame(0x04, b5, b10, b11, x_gu, x_su, be64(t4)).hex()

    assert xor(b1, b10, d4) == r_s
    out["ephemerals"] = {"r_u": r_u.hex(), "r_g": r_g.hex(), "r_s": r_s.hex()}
    out["sk"] = sk.hex()
    out["sk_all_zero"] = H(bytes(96)).hex()
    out["password_block"] = H(b"PWB", pw).hex()
    out["sid_block"] = sid_block.hex()
    return out


def micro_closure() -> dict:
    """Brute-force closure of three terms at depth 2, max arity 2."""
    a, b, c = (bytes([i]) * 32 for i in (1, 2, 3))
    terms = [a, b, c]
    seen = set(terms)
    sizes = []
    for _ in range(2):
        snapshot = list(terms)
        blocks = [t for t in snapshot if len(t) == 32]
        new = [xor(blocks[i], blocks[j]) for i in range(len(blocks)) for j in range(i, len(blocks))]
        new += [H(x) for x in snapshot]
        new += [H(x, y) for x in snapshot for y in snapshot]
        for t in new:
            if t not in seen:
                seen.add(t)
                terms.append(t)
        sizes.append(len(terms))
    return {
        "sizes": sizes,
        "in_depth2": [H(H(a, b), c).hex(), xor(H(a), H(b, c)).hex()],
        "not_in_depth2": [H(H(H(a))).hex(), H(a, b, c).hex()],
    }


if __name__ == "__main__":
    json.dump({"s0": pipeline(), "micro_closure": micro_closure()}, sys.stdout, indent=2)
    sys.stdout.write("\n")
