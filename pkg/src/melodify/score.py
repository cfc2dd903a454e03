"""Score intermediate representation.

A Score is an immutable, fully deterministic timeline: note and pedal
events sorted by tick, plus the metadata a MIDI writer needs (tempo,
time signature, key signature, resolution) and an optional loop marker
describing a repeated region.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Union

from .theory import ScaleMode, build_scale, is_tritone

DEFAULT_TICKS_PER_QUARTER = 480


class Articulation(str, Enum):
    NORMAL = "normal"
    STACCATO = "staccato"
    LEGATO = "legato"
    ACCENT = "accent"


class PedalState(str, Enum):
    DOWN = "down"
    UP = "up"


@dataclass(frozen=True)
class NoteEvent:
    onset_tick: int
    duration_ticks: int
    pitch: int
    velocity: int
    articulation: Articulation


@dataclass(frozen=True)
class PedalEvent:
    tick: int
    state: PedalState


Event = Union[NoteEvent, PedalEvent]


@dataclass(frozen=True)
class Loop:
    """Half-open region [start_tick, end_tick) played ``count`` times."""

    start_tick: int
    end_tick: int
    count: int


@dataclass(frozen=True)
class Score:
    tempo_bpm: int
    time_signature: tuple[int, int]
    key_signature: tuple[int, ScaleMode]
    events: tuple[Event, ...] = ()
    ticks_per_quarter: int = DEFAULT_TICKS_PER_QUARTER
    loop: Loop | None = None


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Violation:
    severity: Severity
    message: str


def event_tick(event: Event) -> int:
    return event.onset_tick if isinstance(event, NoteEvent) else event.tick


def event_sort_key(event: Event) -> tuple[int, int]:
    # Pedal changes land before notes that share their tick.
    return (event_tick(event), 1 if isinstance(event, NoteEvent) else 0)


def sorted_events(events: Iterable[Event]) -> tuple[Event, ...]:
    return tuple(sorted(events, key=event_sort_key))


def _base_end_tick(events: Iterable[Event]) -> int:
    end = 0
    for ev in events:
        if isinstance(ev, NoteEvent):
            end = max(end, ev.onset_tick + ev.duration_ticks)
        else:
            end = max(end, ev.tick)
    return end


def total_duration_ticks(score: Score) -> int:
    """Ticks from zero to the last event end, loop repetitions included."""
    if score.loop is None:
        return _base_end_tick(score.events)
    shift = (score.loop.count - 1) * (score.loop.end_tick - score.loop.start_tick)
    end = 0
    for ev in score.events:
        ev_end = (
            ev.onset_tick + ev.duration_ticks if isinstance(ev, NoteEvent) else ev.tick
        )
        if event_tick(ev) >= score.loop.start_tick:
            ev_end += shift
        end = max(end, ev_end)
    return end


def validate(score: Score) -> list[Violation]:
    """Structural checks as errors plus advisory musical checks as warnings."""
    problems: list[Violation] = []

    def error(message: str) -> None:
        problems.append(Violation(Severity.ERROR, message))

    def warning(message: str) -> None:
        problems.append(Violation(Severity.WARNING, message))

    if score.ticks_per_quarter < 1:
        error(f"ticks_per_quarter must be positive, got {score.ticks_per_quarter}")
    if score.tempo_bpm < 1:
        error(f"tempo must be positive, got {score.tempo_bpm}")
    numerator, denominator = score.time_signature
    if numerator < 1 or denominator < 1 or denominator & (denominator - 1):
        error(f"bad time signature {numerator}/{denominator}")

    previous_key = None
    for i, ev in enumerate(score.events):
        key = event_sort_key(ev)
        if previous_key is not None and key < previous_key:
            error(f"event {i} out of order (tick {event_tick(ev)})")
        previous_key = key
        if isinstance(ev, NoteEvent):
            if ev.onset_tick < 0:
                error(f"event {i}: negative onset {ev.onset_tick}")
            if ev.duration_ticks < 1:
                error(f"event {i}: duration must be at least 1 tick")
            if not 0 <= ev.pitch <= 127:
                error(f"event {i}: pitch {ev.pitch} outside 0..127")
            if not 1 <= ev.velocity <= 127:
                error(f"event {i}: velocity {ev.velocity} outside 1..127")
        else:
            if ev.tick < 0:
                error(f"event {i}: negative pedal tick {ev.tick}")

    pedal_down = False
    for ev in score.events:
        if isinstance(ev, PedalEvent):
            if ev.state is PedalState.DOWN:
                if pedal_down:
                    error("pedal pressed twice without a release")
                pedal_down = True
            else:
                if not pedal_down:
                    error("pedal released without a press")
                pedal_down = False
    if pedal_down:
        error("pedal left pressed at end of score")

    if score.loop is not None:
        base_end = _base_end_tick(score.events)
        if score.loop.count < 1:
            error(f"loop count must be positive, got {score.loop.count}")
        if not 0 <= score.loop.start_tick < score.loop.end_tick <= max(base_end, 1):
            error(
                f"loop region [{score.loop.start_tick}, {score.loop.end_tick}) "
                f"outside score of {base_end} ticks"
            )

    root, mode = score.key_signature
    if not 0 <= root <= 11:
        error(f"key signature root {root} outside 0..11")
    elif mode is not ScaleMode.CHROMATIC:
        scale = build_scale(root, mode)
        for ev in score.events:
            if isinstance(ev, NoteEvent) and not scale.contains(ev.pitch):
                warning(
                    f"pitch {ev.pitch} at tick {ev.onset_tick} outside the "
                    f"{ScaleMode(mode).value} scale on {root}"
                )

    notes = [ev for ev in score.events if isinstance(ev, NoteEvent)]
    for i, first in enumerate(notes):
        first_end = first.onset_tick + first.duration_ticks
        for second in notes[i + 1 :]:
            if second.onset_tick >= first_end:
                break
            if is_tritone(first.pitch, second.pitch):
                warning(
                    f"tritone between pitches {first.pitch} and {second.pitch} "
                    f"sounding together at tick {second.onset_tick}"
                )
    return problems


def structural_errors(score: Score) -> list[Violation]:
    return [v for v in validate(score) if v.severity is Severity.ERROR]


def _shifted(event: Event, by: int) -> Event:
    if by == 0:
        return event
    if isinstance(event, NoteEvent):
        return replace(event, onset_tick=event.onset_tick + by)
    return replace(event, tick=event.tick + by)


def expand_loops(score: Score) -> Score:
    """Materialize the loop region as literal repeats.

    Events inside the region are copied once per repetition; events after
    it shift right by the added length. Idempotent: a score without a
    loop marker comes back unchanged.
    """
    if score.loop is None:
        return score
    start, end, count = score.loop.start_tick, score.loop.end_tick, score.loop.count
    length = end - start
    total_shift = (count - 1) * length
    out: list[Event] = []
    for ev in score.events:
        tick = event_tick(ev)
        if tick < start:
            out.append(ev)
        elif tick < end:
            for i in range(count):
                out.append(_shifted(ev, i * length))
        else:
            out.append(_shifted(ev, total_shift))
    return replace(score, events=sorted_events(out), loop=None)
