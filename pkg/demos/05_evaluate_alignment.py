"""Evaluation harness: CAVDSR, alignment rho, the GICS baseline, and
retrieval metrics.

CAVDSR is the Pearson correlation of the absolute values of two firms'
daily returns (absolute, because one event can move exposed firms in
opposite directions). Alignment rho correlates RRS with CAVDSR across
firm pairs; the sector/industry taxonomy gives the human-defined binary
baseline. The fixture's planted firms load on a shared volatility factor,
so their absolute returns co-move.
"""

import tempfile
from pathlib import Path

from riskrel import corpus, evaluation, pairs, scoring, synthetic, training

root = Path(tempfile.mkdtemp(prefix="riskrel_demo_"))
manifest = synthetic.write_fixture(root)
paragraphs = corpus.ingest_directory(manifest.filings_dir)
returns = evaluation.read_prices_dir(manifest.prices_dir)
gics = evaluation.read_gics_file(manifest.gics_path)

print("=== CAVDSR on the fixture price series ===")
print(f"planted pair ACME/BOLT: {evaluation.cavdsr(returns['ACME'], returns['BOLT']):.4f}")
print(f"unrelated   CRUX/HALE: {evaluation.cavdsr(returns['CRUX'], returns['HALE']):.4f}\n")

all_pairs = []
for fc in corpus.group_by_firm(paragraphs).values():
    all_pairs.extend(pairs.build_chronological_pairs(fc))
all_pairs.extend(pairs.build_lexical_pairs(paragraphs, rng_seed=7))
train_pairs, val_pairs = pairs.split_train_val(all_pairs, 140, 25, rng_seed=7)
outcome = training.train(train_pairs, val_pairs, training.TrainConfig(seed=0))
index = scoring.embed_corpus(outcome.vocab, outcome.params,
                             corpus.group_by_firm(paragraphs).values())
firms, matrix = scoring.rrs_matrix(index, threshold=0.75)

records = []
for i, a in enumerate(firms):
    for j in range(i + 1, len(firms)):
        records.append(evaluation.PairRecord(
            a, firms[j], float(matrix[i, j]),
            evaluation.cavdsr(returns[a], returns[firms[j]])))

print("=== alignment of RRS with return co-movement ===")
print(f"rho (pearson)  = {evaluation.alignment_rho(records):.4f}")
print(f"rho (spearman) = {evaluation.alignment_rho(records, 'spearman'):.4f}")

for level in ("sector", "industry"):
    baseline = [evaluation.PairRecord(
        r.firm_a, r.firm_b,
        float(evaluation.gics_binary_rrs(gics, r.firm_a, r.firm_b, level)),
        r.cavdsr) for r in records]
    try:
        rho = f"{evaluation.alignment_rho(baseline):.4f}"
    except evaluation.DegenerateInput:
        rho = "degenerate"
    print(f"rho (GICS {level} binary baseline) = {rho}")

print("\n=== retrieval metrics on a toy ranked list ===")
lists = [evaluation.RankedList("q1", ("d2", "d7", "d1", "d9"),
                               frozenset({"d7", "d1"})),
         evaluation.RankedList("q2", ("d1", "d3", "d4", "d2"),
                               frozenset({"d1"}))]
table = evaluation.retrieval_metrics(lists, [1, 3])
for metric in ("ndcg", "precision", "recall"):
    cells = "  ".join(f"@{k}={table[metric][k]:.4f}" for k in (1, 3))
    print(f"  {metric:<9} {cells}")
