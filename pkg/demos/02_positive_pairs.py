"""Positive-pair construction: the chronological and lexical views.

Chronological view: same-firm paragraphs sharing an identical calendar
date become a pair, and every date mention is deleted from both sides so
training cannot match on the date tokens themselves. Quarter-end
accounting dates (3/31, 6/30, 9/30, 12/31) never justify a pair.

Lexical view: two overlapping spans of one paragraph become a pair,
exploiting boilerplate phrasing reuse.
"""

import tempfile
from pathlib import Path

from riskrel import corpus, pairs, synthetic

root = Path(tempfile.mkdtemp(prefix="riskrel_demo_"))
manifest = synthetic.write_fixture(root)
paragraphs = corpus.ingest_directory(manifest.filings_dir)

print("=== date detection ===")
sample = next(p for p in paragraphs if pairs.detect_date_tokens(p))
for mention in pairs.detect_date_tokens(sample):
    span = sample.tokens[mention.token_span[0]:mention.token_span[1]]
    print(f"  {sample.id}: tokens {span} -> {mention.normalized}"
          f"{'  [accounting]' if mention.is_accounting else ''}")
print()

print("=== chronological pairs ===")
chrono = []
for fc in corpus.group_by_firm(paragraphs).values():
    chrono.extend(pairs.build_chronological_pairs(fc))
print(f"{len(chrono)} pairs across the corpus")
pair = chrono[0]
print(f"example pair from {pair.provenance}")
print("left side starts:", " ".join(pair.left_tokens[:14]))
residue = pairs.scan_tokens(pair.left_tokens) + pairs.scan_tokens(pair.right_tokens)
print(f"date mentions remaining after removal: {len(residue)}\n")

print("=== lexical pairs ===")
stats = {}
lexical = pairs.build_lexical_pairs(paragraphs, rng_seed=7, stats=stats)
print(f"{len(lexical)} pairs, {stats['skipped_short']} paragraphs too short")
pair = lexical[0]
i, j = pair.seed_info
n = len(pair.right_tokens) + i - 1
print(f"source {pair.provenance[0]}: n={n} tokens, drew i={i}, j={j}")
print(f"left  = w_1..w_{j}   ({len(pair.left_tokens)} tokens)")
print(f"right = w_{i}..w_{n} ({len(pair.right_tokens)} tokens)")
print(f"overlap = w_{i}..w_{j}\n")

print("=== seeded train/validation split ===")
train, val = pairs.split_train_val(chrono + lexical, 140, 25, rng_seed=7)
print(f"train {len(train)} pairs, val {len(val)} pairs "
      f"(140 + 25 for each of the two views, paragraph-disjoint per view)")
