"""Render the built-in demonstration tracks and print a summary table.

Usage: python scripts/render_tracklist.py [--out DIR]

Writes one .mid and one .txt per track, then prints slug, idiom,
palette, note count, and wall-clock length. Output is deterministic, so
re-running into the same directory is idempotent.
"""
from __future__ import annotations

import argparse
from pathlib import Path

from melodify.score import NoteEvent, expand_loops, total_duration_ticks
from melodify.smf import SmfConfig, write_smf, write_text_score
from melodify.tracks import TRACKS, render_track


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="tracks", help="output directory")
    args = parser.parse_args()

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    print(f"{'track':<24} {'idiom':<8} {'palette':<9} {'notes':>5} {'ticks':>6} {'secs':>6}")
    for track in TRACKS:
        score = render_track(track)
        expanded = expand_loops(score)
        (out_dir / f"{track.slug}.mid").write_bytes(write_smf(expanded, SmfConfig()))
        (out_dir / f"{track.slug}.txt").write_text(
            write_text_score(score), encoding="utf-8"
        )
        ticks = total_duration_ticks(expanded)
        notes = sum(1 for e in expanded.events if isinstance(e, NoteEvent))
        seconds = ticks / expanded.ticks_per_quarter * 60 / expanded.tempo_bpm
        print(
            f"{track.slug:<24} {track.spec.idiom.value:<8} "
            f"{track.spec.palette.value:<9} {notes:>5} {ticks:>6} {seconds:>6.1f}"
        )
    print(f"\nwrote {2 * len(TRACKS)} files to {out_dir}/")


if __name__ == "__main__":
    main()
