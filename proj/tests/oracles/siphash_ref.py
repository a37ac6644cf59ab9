#!/usr/bin/env python3
"""Reference SipHash-2-4 used to freeze tests/data/siphash_fixture.tsv.

Written independently of the C++ implementation. Run it to regenerate the
fixture; the C++ tests only read the frozen file.
"""
import struct
import sys

MASK = (1 << 64) - 1


def rotl(x, b):
    return ((x << b) | (x >> (64 - b))) & MASK


def siphash24(key: bytes, msg: bytes) -> int:
    assert len(key) == 16
    k0, k1 = struct.unpack("<QQ", key)
    v = [k0 ^ 0x736F6D6570736575, k1 ^ 0x646F72616E646F6D,
         k0 ^ 0x6C7967656E657261, k1 ^ 0x7465646279746573]

    def rnd():
        v[0] = (v[0] + v[1]) & MASK; v[1] = rotl(v[1], 13); v[1] ^= v[0]; v[0] = rotl(v[0], 32)
        v[2] = (v[2] + v[3]) & MASK; v[3] = rotl(v[3], 16); v[3] ^= v[2]
        v[0] = (v[0] + v[3]) & MASK; v[3] = rotl(v[3], 21); v[3] ^= v[0]
        v[2] = (v[2] + v[1]) & MASK; v[1] = rotl(v[1], 17); v[1] ^= v[2]; v[2] = rotl(v[2], 32)

    n = len(msg)
    full = n - n % 8
    for i in range(0, full, 8):
        m = struct.unpack("<Q", msg[i:i + 8])[0]
        v[3] ^= m
        rnd(); rnd()
        v[0] ^= m
    tail = msg[full:] + b"\x00" * (7 - n % 8) + bytes([n & 0xFF])
    m = struct.unpack("<Q", tail)[0]
    v[3] ^= m
    rnd(); rnd()
    v[0] ^= m
    v[2] ^= 0xFF
    for _ in range(4):
        rnd()
    return (v[0] ^ v[1] ^ v[2] ^ v[3]) & MASK


EQC_KEY = b"sumlife:eqc:v1.0"


def hash_pair(predicate: str, child: int) -> int:
    return siphash24(EQC_KEY, predicate.encode("utf-8") + b"\x00" + struct.pack("<Q", child))


def main():
    # Published test vectors: key 00..0f, message 00..(n-1).
    key = bytes(range(16))
    assert siphash24(key, b"") == 0x726FDB47DD0E0E31
    assert siphash24(key, bytes(range(15))) == 0xA129CA6149BE45E5
    out = sys.stdout
    out.write("# kind\tinput\tvalue_hex\n")
    for n in (0, 1, 7, 8, 15, 16, 63):
        out.write("vector\t%d\t%016x\n" % (n, siphash24(key, bytes(range(n)))))
    cases = [
        ("http://p", 0x0102030405060708),
        ("http://p", 0),
        ("http://q", 0),
        ("http://xmlns.com/foaf/0.1/name", 0),
        ("http://xmlns.com/foaf/0.1/knows", 0xFFFFFFFFFFFFFFFF),
    ]
    for p, h in cases:
        out.write("pair\t%s|%016x\t%016x\n" % (p, h, hash_pair(p, h)))


if __name__ == "__main__":
    main()
