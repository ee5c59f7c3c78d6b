#!/usr/bin/env python3
"""Independent reference for the deterministic generator's golden fixture.

Evaluates the FNV-1a-64 chain directly from its byte-level definition and
prints the golden fixture JSON. Regenerate with

    python3 tests/oracles/fnv_golden.py > data/detgen_golden.json

Token rule: fmix64(fnv1a64(encoding)) mod vocab_size.
"""
import json
import sys

OFFSET = 14695981039346656037
PRIME = 1099511628211
MASK = (1 << 64) - 1


def fnv1a(data: bytes) -> int:
    h = OFFSET
    for b in data:
        h ^= b
        h = (h * PRIME) & MASK
    return h


def fmix64(k: int) -> int:
    k ^= k >> 33
    k = (k * 0xFF51AFD7ED558CCD) & MASK
    k ^= k >> 33
    k = (k * 0xC4CEB9FE1A85EC53) & MASK
    k ^= k >> 33
    return k


def encode(model_id: str, seed: int, context) -> bytes:
    out = model_id.encode("utf-8") + seed.to_bytes(8, "little")
    for t in context:
        out += t.to_bytes(4, "little")
    return out


def next_token(model_id, seed, vocab, context):
    return fmix64(fnv1a(encode(model_id, seed, context))) % vocab


def generate(model_id, seed, vocab, prompt, m):
    ctx = list(prompt)
    out = []
    for _ in range(m):
        t = next_token(model_id, seed, vocab, ctx)
        out.append(t)
        ctx.append(t)
    return out


def drift_coin(digest: int, drift_seed: int) -> float:
    d2 = fnv1a(digest.to_bytes(8, "little") + drift_seed.to_bytes(8, "little"))
    return (fmix64(d2) % (1 << 53)) / float(1 << 53)


CASES = [
    ("ref", 0, 256, 64, [], 1),
    ("ref", 42, 256, 64, [1, 2, 3], 8),
    ("ref", 42, 50000, 128, [1, 2, 3], 16),
    ("ref-small", 7, 1000, 64, [10, 20, 30, 40], 12),
    ("llama-sim", 18446744073709551615, 32000, 512, [0, 31999, 5], 20),
    ("ref", 1, 2, 64, [], 10),
    ("", 3, 97, 64, [96], 6),
]


def main():
    cases = []
    for model_id, seed, vocab, cap, prompt, m in CASES:
        cases.append({
            "config": {"model_id": model_id, "seed": seed,
                       "vocab_size": vocab, "max_output": cap},
            "prompt": prompt,
            "m": m,
            "digest_empty_context": fnv1a(encode(model_id, seed, [])),
            "expected": generate(model_id, seed, vocab, prompt, m),
        })
    drift = []
    for digest_ctx, drift_seed in [([], 0), ([1, 2, 3], 99), ([7], 12345)]:
        digest = fnv1a(encode("ref", 42, digest_ctx))
        drift.append({"digest": digest, "drift_seed": drift_seed,
                      "coin": drift_coin(digest, drift_seed)})
    doc = {"schema_version": "1",
           "hash": "fmix64(fnv1a-64(model_id utf-8 | seed u64 le | tokens u32 le)) mod vocab",
           "cases": cases, "drift_coins": drift}
    json.dump(doc, sys.stdout, indent=1)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
