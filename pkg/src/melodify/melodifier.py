"""Mapping engine: dataset plus intent in, score out.

Each chart idiom gets its own melodic shape. Bar charts become one
chord per category, pie charts a looped cycle of chords whose durations
split the cycle by value, line charts legato arpeggios that follow the
fitted trend segments, scatter plots a stream of detached staccato
notes. The palette fixes scale mode, tempo, meter, and the closing
cadence; the data's own spread, density, and trend shape everything
else.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import TooShort
from .ingest import ColumnKind, Dataset, Idiom, MelodySpec, Palette, validate_binding
from .score import (
    DEFAULT_TICKS_PER_QUARTER,
    Articulation,
    Event,
    Loop,
    NoteEvent,
    PedalEvent,
    PedalState,
    Score,
    sorted_events,
)
from .stats import (
    DensityClass,
    DensityLevel,
    Proportions,
    TrendDirection,
    TrendSegment,
    VarianceClass,
    VarianceLevel,
    compute_density,
    compute_variance,
    proportions,
    segment_trends,
)
from .theory import (
    ArpeggioDirection,
    CadenceKind,
    Chord,
    ChordQuality,
    Scale,
    ScaleMode,
    Valence,
    arpeggiate,
    build_scale,
    degree_triad,
    make_cadence,
    quantize_pitch,
    triad_on_pitch,
)

# Lowest pitch of the mapped range: one octave below middle C, then up
# by the key root.
BASS_ANCHOR = 48

PIE_CYCLE_BARS = 4

VELOCITY_NORMAL = 80
VELOCITY_ACCENT = 112
VELOCITY_CADENCE = 96

# Replace diminished chart chords with the dominant so bar charts never
# land on a bare tritone.
SUBSTITUTE_DIMINISHED = True

# palette -> (scale mode, tempo, time signature, cadence)
PALETTE_PRESETS = {
    Palette.POSITIVE: (ScaleMode.MAJOR, 120, (4, 4), CadenceKind.PERFECT),
    Palette.NEGATIVE: (ScaleMode.NATURAL_MINOR, 88, (4, 4), CadenceKind.DECEPTIVE),
    Palette.GREY: (ScaleMode.CHROMATIC, 100, (4, 4), CadenceKind.NONE),
    Palette.EXCITING: (ScaleMode.MAJOR, 160, (2, 4), CadenceKind.PERFECT),
    Palette.CALM: (ScaleMode.MAJOR, 72, (3, 4), CadenceKind.PERFECT),
}

SUBDIVISION_BY_DENSITY = {
    DensityLevel.LOW: 1,
    DensityLevel.MEDIUM: 2,
    DensityLevel.HIGH: 4,
}


@dataclass(frozen=True)
class TonalPlan:
    """Palette rendered concrete: the scale and performance parameters."""

    scale: Scale
    tempo_bpm: int
    time_signature: tuple[int, int]
    cadence: CadenceKind


@dataclass(frozen=True)
class DataCharacter:
    """Summaries the data dictates regardless of palette choice."""

    segments: tuple[TrendSegment, ...] | None
    density: DensityClass
    variance: VarianceClass
    proportions: Proportions | None


def apply_palette(spec: MelodySpec) -> TonalPlan:
    """Resolve the palette presets, honoring spec-level overrides."""
    mode, tempo, meter, cadence = PALETTE_PRESETS[spec.palette]
    return TonalPlan(
        scale=build_scale(spec.key_root, mode),
        tempo_bpm=spec.tempo_bpm if spec.tempo_bpm is not None else tempo,
        time_signature=spec.time_signature if spec.time_signature is not None else meter,
        cadence=cadence,
    )


def bar_ticks(time_signature: tuple[int, int], ticks_per_quarter: int) -> int:
    numerator, denominator = time_signature
    return numerator * 4 * ticks_per_quarter // denominator


def _anchor(spec: MelodySpec) -> int:
    return BASS_ANCHOR + spec.key_root


def _ordered_series(dataset: Dataset, spec: MelodySpec) -> list[float]:
    """The y series in playing order: sorted by x for line and scatter
    when an x column is bound, dataset row order otherwise."""
    y = list(dataset.column(spec.y_field).values)
    if spec.idiom in (Idiom.LINE, Idiom.SCATTER) and spec.x_field is not None:
        x_col = dataset.column(spec.x_field)
        if x_col.kind is ColumnKind.QUANTITATIVE:
            order = sorted(range(len(y)), key=lambda i: x_col.values[i])
            y = [y[i] for i in order]
    return y


def derive_character(dataset: Dataset, spec: MelodySpec) -> DataCharacter:
    series = _ordered_series(dataset, spec)
    n = len(series)
    segments = None
    if spec.idiom is Idiom.LINE:
        segments = tuple(segment_trends(series))
    if n >= 2:
        variance = compute_variance(series)
    else:
        variance = VarianceClass(VarianceLevel.NARROW, 12)
    props = None
    if spec.idiom is Idiom.PIE:
        categories = dataset.column(spec.x_field).values
        props = proportions(zip(categories, dataset.column(spec.y_field).values))
    return DataCharacter(segments, compute_density(n), variance, props)


def largest_remainder_allocation(ratios: list[float], total_units: int) -> list[int]:
    """Integer units per ratio, summing exactly to ``total_units``.

    Everyone gets the floor of their exact share; leftover units go to
    the largest fractional remainders, earlier entries winning ties.
    """
    exact = [r * total_units for r in ratios]
    units = [math.floor(e) for e in exact]
    leftover = total_units - sum(units)
    by_remainder = sorted(
        range(len(ratios)), key=lambda i: (-(exact[i] - units[i]), i)
    )
    for i in by_remainder[:leftover]:
        units[i] += 1
    return units


def _quantized_chord(
    value: float,
    domain: tuple[float, float],
    scale: Scale,
    span_semitones: int,
    anchor: int,
    substitute: bool = SUBSTITUTE_DIMINISHED,
) -> Chord:
    """Chord for one category: quantize the value to a scale member and
    stack the diatonic triad on it. In a chromatic plan every root
    carries a plain major triad, a local key of its own."""
    root = quantize_pitch(value, domain, scale, span_semitones, anchor)
    if scale.mode is ScaleMode.CHROMATIC:
        return triad_on_pitch(root, ChordQuality.MAJOR)
    degree = scale.member_classes.index(root % 12) + 1
    chord = degree_triad(scale, degree, root)
    if substitute and chord.quality is ChordQuality.DIMINISHED:
        chord = _dominant_substitute(scale, root)
    return chord


def _dominant_substitute(scale: Scale, near_pitch: int) -> Chord:
    """The dominant triad voiced at the octave closest to the pitch it
    replaces, lower on a tie."""
    dominant_class = scale.member_classes[4]
    above = near_pitch + ((dominant_class - near_pitch) % 12)
    below = above - 12
    if below >= 0 and (near_pitch - below) <= (above - near_pitch):
        root = below
    else:
        root = above
    return degree_triad(scale, 5, root)


def _cadence_chords(plan: TonalPlan, anchor: int) -> list[Chord]:
    """Closing chords for the plan. A minor-mode piece cadences through
    its relative major, which keeps every cadence tone inside the plan
    scale while still closing V to vi."""
    if plan.cadence is CadenceKind.NONE:
        return []
    if plan.scale.mode is ScaleMode.MAJOR:
        cadence_scale = plan.scale
    else:
        cadence_scale = build_scale((plan.scale.root + 3) % 12, ScaleMode.MAJOR)
    valence = (
        Valence.POSITIVE if plan.cadence is CadenceKind.PERFECT else Valence.NEGATIVE
    )
    return make_cadence(valence, cadence_scale, anchor)


def _chord_events(
    chord: Chord, onset: int, duration: int, velocity: int
) -> list[NoteEvent]:
    return [
        NoteEvent(onset, duration, pitch, velocity, Articulation.NORMAL)
        for pitch in chord.pitches
    ]


def _cadence_events(plan: TonalPlan, anchor: int, start_tick: int) -> list[NoteEvent]:
    bar = bar_ticks(plan.time_signature, DEFAULT_TICKS_PER_QUARTER)
    events: list[NoteEvent] = []
    for i, chord in enumerate(_cadence_chords(plan, anchor)):
        events.extend(
            _chord_events(chord, start_tick + i * bar, bar, VELOCITY_CADENCE)
        )
    return events


def _next_bar_boundary(tick: int, bar: int) -> int:
    return ((tick + bar - 1) // bar) * bar


def _assemble(
    spec: MelodySpec,
    plan: TonalPlan,
    events: list[Event],
    loop: Loop | None = None,
) -> Score:
    return Score(
        tempo_bpm=plan.tempo_bpm,
        time_signature=plan.time_signature,
        key_signature=(spec.key_root, plan.scale.mode),
        events=sorted_events(events),
        ticks_per_quarter=DEFAULT_TICKS_PER_QUARTER,
        loop=loop,
    )


def melodify_bar(
    dataset: Dataset,
    spec: MelodySpec,
    plan: TonalPlan,
    character: DataCharacter | None = None,
) -> Score:
    """One chord per category, each a full bar, roots tracking the values."""
    if character is None:
        character = derive_character(dataset, spec)
    values = dataset.column(spec.y_field).values
    anchor = _anchor(spec)
    domain = (min(values), max(values))
    bar = bar_ticks(plan.time_signature, DEFAULT_TICKS_PER_QUARTER)
    span = character.variance.semitone_span

    events: list[Event] = []
    for i, value in enumerate(values):
        chord = _quantized_chord(value, domain, plan.scale, span, anchor)
        events.extend(_chord_events(chord, i * bar, bar, VELOCITY_NORMAL))
    body_end = len(values) * bar

    if spec.histogram and character.density.level is DensityLevel.LOW:
        events.append(PedalEvent(0, PedalState.DOWN))
        events.append(PedalEvent(body_end, PedalState.UP))

    events.extend(_cadence_events(plan, anchor, body_end))
    return _assemble(spec, plan, events)


def melodify_pie(
    dataset: Dataset,
    spec: MelodySpec,
    plan: TonalPlan,
    character: DataCharacter | None = None,
) -> Score:
    """A chord cycle over four bars, each chord holding its share of the
    cycle (snapped to the sixteenth grid), repeated per the loop count."""
    if character is None:
        character = derive_character(dataset, spec)
    values = dataset.column(spec.y_field).values
    anchor = _anchor(spec)
    domain = (min(values), max(values))
    bar = bar_ticks(plan.time_signature, DEFAULT_TICKS_PER_QUARTER)
    span = character.variance.semitone_span

    cycle = PIE_CYCLE_BARS * bar
    grid = DEFAULT_TICKS_PER_QUARTER // 4
    ratios = [ratio for _, ratio in character.proportions.entries]
    units = largest_remainder_allocation(ratios, cycle // grid)

    events: list[Event] = []
    cursor = 0
    for value, unit_count in zip(values, units):
        if unit_count == 0:
            continue
        duration = unit_count * grid
        chord = _quantized_chord(value, domain, plan.scale, span, anchor)
        events.extend(_chord_events(chord, cursor, duration, VELOCITY_NORMAL))
        cursor += duration

    events.extend(_cadence_events(plan, anchor, cycle))
    loop = Loop(0, cycle, spec.loop_count)
    return _assemble(spec, plan, events, loop=loop)


def _slope_unit(series: list[float]) -> float:
    """Slope normalizer for degree mapping: 1 when the data moves in
    integer steps, otherwise the average step of the full range."""
    differences = [b - a for a, b in zip(series, series[1:])]
    integer_stepped = all(abs(d - round(d)) <= 1e-9 for d in differences)
    span = max(series) - min(series)
    if integer_stepped or span == 0:
        return 1.0
    return span / (len(series) - 1)


def _segment_degree(segment: TrendSegment, unit: float) -> int:
    normalized = abs(segment.slope) / unit
    return min(7, max(1, int(normalized + 0.5)))


def melodify_line(
    dataset: Dataset,
    spec: MelodySpec,
    plan: TonalPlan,
    character: DataCharacter | None = None,
) -> Score:
    """Legato arpeggios, one per trend segment.

    The segment's normalized slope picks a scale degree; the arpeggio
    walks a triad rooted there, major in bright palettes and minor in
    the negative one, rising, falling, or holding the root to match the
    trend. In the grey palette a chromatic passing tone slips in between
    tones more than two semitones apart. The first note of each new
    segment after the first is accented.
    """
    if character is None:
        character = derive_character(dataset, spec)
    series = _ordered_series(dataset, spec)
    if len(series) < 2:
        raise TooShort("line melodification needs at least 2 points")
    anchor = _anchor(spec)
    unit = _slope_unit(series)
    duration = DEFAULT_TICKS_PER_QUARTER // SUBDIVISION_BY_DENSITY[
        character.density.level
    ]

    chromatic_plan = plan.scale.mode is ScaleMode.CHROMATIC
    if chromatic_plan:
        degree_scale = build_scale(plan.scale.root, ScaleMode.MAJOR)
    else:
        degree_scale = plan.scale
    quality = (
        ChordQuality.MINOR
        if spec.palette is Palette.NEGATIVE
        else ChordQuality.MAJOR
    )

    events: list[Event] = []
    cursor = 0
    for index, segment in enumerate(character.segments):
        chord = degree_triad(
            degree_scale, _segment_degree(segment, unit), anchor, force_quality=quality
        )
        count = segment.end_index - segment.start_index + 1
        if segment.direction is TrendDirection.NEUTRAL:
            pitches = [chord.root] * count
        else:
            window = (127 - chord.pitches[2]) // 12 + 1
            walk_direction = (
                ArpeggioDirection.UP
                if segment.direction is TrendDirection.ASCENDING
                else ArpeggioDirection.DOWN
            )
            pitches = arpeggiate(chord, walk_direction, count, max_octaves=window)

        specs = [[pitch, duration] for pitch in pitches]
        if chromatic_plan:
            specs = _with_passing_tones(specs)
        for position, (pitch, ticks) in enumerate(specs):
            accented = index > 0 and position == 0
            events.append(
                NoteEvent(
                    cursor,
                    ticks,
                    pitch,
                    VELOCITY_ACCENT if accented else VELOCITY_NORMAL,
                    Articulation.ACCENT if accented else Articulation.LEGATO,
                )
            )
            cursor += ticks

    bar = bar_ticks(plan.time_signature, DEFAULT_TICKS_PER_QUARTER)
    events.extend(_cadence_events(plan, anchor, _next_bar_boundary(cursor, bar)))
    return _assemble(spec, plan, events)


def _with_passing_tones(specs: list[list[int]]) -> list[list[int]]:
    """Slip a chromatic passing tone in front of any tone approached by
    a leap of more than two semitones, borrowing half the previous
    note's duration so the segment keeps its length."""
    out: list[list[int]] = []
    for i, (pitch, duration) in enumerate(specs):
        if i + 1 < len(specs) and abs(specs[i + 1][0] - pitch) > 2:
            target = specs[i + 1][0]
            step = 1 if target > pitch else -1
            half = duration // 2
            out.append([pitch, duration - half])
            out.append([target - step, half])
        else:
            out.append([pitch, duration])
    return out


def melodify_scatter(
    dataset: Dataset,
    spec: MelodySpec,
    plan: TonalPlan,
    character: DataCharacter | None = None,
) -> Score:
    """A staccato note per point on an even grid, sixteenths when dense,
    quarters when sparse; sparse scatters get one sustain-pedal stroke
    across the phrase."""
    if character is None:
        character = derive_character(dataset, spec)
    series = _ordered_series(dataset, spec)
    anchor = _anchor(spec)
    domain = (min(series), max(series))
    span = character.variance.semitone_span
    step = DEFAULT_TICKS_PER_QUARTER // SUBDIVISION_BY_DENSITY[
        character.density.level
    ]

    events: list[Event] = []
    for i, value in enumerate(series):
        pitch = quantize_pitch(value, domain, plan.scale, span, anchor)
        events.append(
            NoteEvent(i * step, step, pitch, VELOCITY_NORMAL, Articulation.STACCATO)
        )
    body_end = len(series) * step

    if character.density.level is DensityLevel.LOW:
        events.append(PedalEvent(0, PedalState.DOWN))
        events.append(PedalEvent(body_end, PedalState.UP))

    bar = bar_ticks(plan.time_signature, DEFAULT_TICKS_PER_QUARTER)
    events.extend(_cadence_events(plan, anchor, _next_bar_boundary(body_end, bar)))
    return _assemble(spec, plan, events)


_DISPATCH = {
    Idiom.BAR: melodify_bar,
    Idiom.PIE: melodify_pie,
    Idiom.LINE: melodify_line,
    Idiom.SCATTER: melodify_scatter,
}


def melodify(dataset: Dataset, spec: MelodySpec) -> Score:
    """Full pipeline: validate the binding, summarize the data, resolve
    the palette, and hand off to the idiom's mapper."""
    dataset, spec = validate_binding(dataset, spec)
    plan = apply_palette(spec)
    character = derive_character(dataset, spec)
    return _DISPATCH[spec.idiom](dataset, spec, plan, character)
