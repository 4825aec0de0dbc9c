#!/usr/bin/env python3
"""Scores the labeled corpus through the CLI and writes data/corpus/scores.jsonl.

Usage: score_corpus.py BUILD_DIR
"""
import json
import pathlib
import subprocess
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def main() -> int:
    if len(sys.argv) != 2:
        print(__doc__, file=sys.stderr)
        return 1
    cli = pathlib.Path(sys.argv[1]) / "tools" / "guardsec"
    config = ROOT / "config" / "corpus.json"
    lines = []
    for raw in (ROOT / "data" / "corpus" / "labels.jsonl").read_text().splitlines():
        if not raw.strip():
            continue
        ex = json.loads(raw)
        out = subprocess.run(
            [str(cli), "--config", str(config), "--json", "verify", "--kind", ex["kind"], ex["entity"]],
            capture_output=True, text=True, check=True)
        lines.append(json.dumps({"entity": ex["entity"], "score": json.loads(out.stdout)["score"]}))
    (ROOT / "data" / "corpus" / "scores.jsonl").write_text("\n".join(lines) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
