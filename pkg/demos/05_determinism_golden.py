"""Bit-exact determinism: thread counts, reruns, and golden vectors.

Compressed streams are a pure function of (input bits, configuration):
worker counts only change scheduling, never bytes. A committed golden
record (a fixed splitmix64 corpus compressed under fixed configs, hashed
with SHA-256) turns any determinism regression - or a non-conforming
build - into a one-line failure.
"""

import hashlib

import numpy as np

from gebq import QuantConfig, compress
from gebq.verify import check_golden, golden_corpus_bits

words = golden_corpus_bits()
corpus = (words & np.uint64(0xFFFFFFFF)).astype(np.uint32).view(np.float32)
print(f"golden corpus: {len(corpus)} f32 patterns "
      f"(raw splitmix64 words: all value classes occur)")

cfg = QuantConfig(mode="rel", eb=1e-3)
digests = {}
for workers in (1, 4, 16):
    stream, _ = compress(corpus, cfg, workers=workers)
    digests[workers] = hashlib.sha256(stream).hexdigest()
    print(f"  workers={workers:>2}: sha256 {digests[workers][:32]}...")
assert len(set(digests.values())) == 1, "streams must not depend on thread count"
print("byte-identical across thread counts.")

result = check_golden()
print(f"\ncommitted golden record: {'MATCH' if result['passed'] else 'MISMATCH'}")
print(f"  overall digest: {result['overall']}")
if not result["passed"]:
    print(f"  first differing (config, block): {result['first_difference']}")

# To compare a second machine or build, run `gebq golden --print-record`
# there and diff the JSON against src/gebq/golden.json.
