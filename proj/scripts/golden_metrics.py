#!/usr/bin/env python3
"""Reference metrics for the labeled corpus, computed without the C++ code.

Reads data/corpus/labels.jsonl and scores.jsonl and writes golden_metrics.json.
AUC is the pairwise win rate over every (positive, negative) pair with ties
counted as one half. Kappa compares label against label_b.
"""
import json
import pathlib
import sys
from fractions import Fraction

ROOT = pathlib.Path(__file__).resolve().parent.parent
CORPUS = ROOT / "data" / "corpus"
KINDS = ["url", "domain", "email", "phone", "business"]
THRESHOLD = 0.25


def read_jsonl(path):
    return [json.loads(l) for l in path.read_text().splitlines() if l.strip() and not l.startswith("#")]


def ratio(num, den):
    return None if den == 0 else num / den


def metrics(rows):
    tp = sum(1 for r in rows if r["label"] and r["score"] >= THRESHOLD)
    fp = sum(1 for r in rows if not r["label"] and r["score"] >= THRESHOLD)
    tn = sum(1 for r in rows if not r["label"] and r["score"] < THRESHOLD)
    fn = sum(1 for r in rows if r["label"] and r["score"] < THRESHOLD)
    precision = ratio(tp, tp + fp)
    recall = ratio(tp, tp + fn)
    f1 = None
    if precision is not None and recall is not None and precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)

    pos = [r["score"] for r in rows if r["label"]]
    neg = [r["score"] for r in rows if not r["label"]]
    auc = None
    if pos and neg:
        wins = Fraction(0)
        for p in pos:
            for q in neg:
                wins += 1 if p > q else Fraction(1, 2) if p == q else 0
        auc = float(wins / (len(pos) * len(neg)))

    kappa = None
    if rows and all("label_b" in r for r in rows):
        n = len(rows)
        po = Fraction(sum(1 for r in rows if r["label"] == r["label_b"]), n)
        a1 = Fraction(sum(1 for r in rows if r["label"]), n)
        b1 = Fraction(sum(1 for r in rows if r["label_b"]), n)
        pe = a1 * b1 + (1 - a1) * (1 - b1)
        if pe != 1:
            kappa = float((po - pe) / (1 - pe))

    return {"n": len(rows), "tp": tp, "fp": fp, "tn": tn, "fn": fn, "precision": precision, "recall": recall,
            "f1": f1, "auc": auc, "kappa": kappa}


def main() -> int:
    labels = read_jsonl(CORPUS / "labels.jsonl")
    scores = {s["entity"]: s["score"] for s in read_jsonl(CORPUS / "scores.jsonl")}
    if set(scores) != {l["entity"] for l in labels}:
        print("labels and scores cover different entities", file=sys.stderr)
        return 1
    rows = [dict(l, score=scores[l["entity"]]) for l in labels]
    report = {
        "threshold": THRESHOLD,
        "overall": metrics(rows),
        "per_kind": {k: (metrics([r for r in rows if r["kind"] == k]) if any(r["kind"] == k for r in rows) else None)
                     for k in KINDS},
    }
    (CORPUS / "golden_metrics.json").write_text(json.dumps(report, indent=2) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
