"""Compile one dataset under every palette to hear what mood changes.

Usage: python scripts/compile_demo.py [--out DIR] [--idiom IDIOM]

Builds a small quarterly-revenue table, compiles it once per palette,
and writes a .mid plus .txt pair for each. The data never changes
between runs; only the palette does, so the differences you hear are
exactly the palette mappings (scale, tempo, meter, cadence).
"""
from __future__ import annotations

import argparse
from pathlib import Path

from melodify.ingest import Idiom, Palette, parse_table, spec_from_mapping, TableFormat
from melodify.melodifier import melodify
from melodify.score import expand_loops
from melodify.smf import SmfConfig, write_smf, write_text_score

REVENUE_CSV = b"""quarter,revenue
Q1,104
Q2,117
Q3,93
Q4,128
"""


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="demo", help="output directory")
    parser.add_argument(
        "--idiom",
        default="bar",
        choices=[i.value for i in Idiom],
        help="chart idiom to compile the table as",
    )
    args = parser.parse_args()

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "revenue.csv").write_bytes(REVENUE_CSV)

    dataset = parse_table(REVENUE_CSV, TableFormat.CSV)
    needs_x = args.idiom in ("bar", "pie")
    for palette in Palette:
        mapping = {"idiom": args.idiom, "palette": palette.value, "y": "revenue"}
        if needs_x:
            mapping["x"] = "quarter"
        score = melodify(dataset, spec_from_mapping(mapping))
        stem = out_dir / f"revenue-{args.idiom}-{palette.value}"
        stem.with_suffix(".mid").write_bytes(write_smf(expand_loops(score), SmfConfig()))
        stem.with_suffix(".txt").write_text(write_text_score(score), encoding="utf-8")
        print(f"wrote {stem}.mid  (tempo {score.tempo_bpm}, "
              f"{score.time_signature[0]}/{score.time_signature[1]})")


if __name__ == "__main__":
    main()
