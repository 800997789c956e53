"""MIDI semantics for engine events: SMF export and CC message framing.

Files are Standard MIDI File format 0 with a fixed 480 ticks per quarter
note, one track, explicit status bytes (no running status). Event times
arrive in engine steps and are placed at ``step * 480 / steps_per_beat``.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

from .arp import NoteEvent

TPQN = 480
NOTE_ON = "note_on"
NOTE_OFF = "note_off"
CONTROL_CHANGE = "control_change"

_HEADER = bytes.fromhex("4d546864000000060000000101e0")


@dataclass
class MidiMessage:
    kind: str  # note_on | note_off | control_change
    channel: int
    data1: int  # pitch or controller number
    data2: int  # velocity or controller value
    tick: int


def _check_7bit(name: str, v: int) -> int:
    if not 0 <= v <= 127:
        raise ValueError(f"{name} {v} outside MIDI range 0..127")
    return int(v)


def _var_len(value: int) -> bytes:
    """MIDI variable-length quantity, 7 bits per byte, MSB-first."""
    if value < 0:
        raise ValueError("delta time must be non-negative")
    chunks = [value & 0x7F]
    value >>= 7
    while value:
        chunks.append(0x80 | (value & 0x7F))
        value >>= 7
    return bytes(reversed(chunks))


def _step_to_tick(step: float, steps_per_beat: int) -> int:
    return int(math.floor(step * TPQN / steps_per_beat + 0.5))


def events_to_smf(events, steps_per_beat: int, channel: int = 0) -> bytes:
    """Serialize NoteEvents and timed CC messages to SMF format 0 bytes.

    ``events`` is a time-sorted mix of :class:`NoteEvent` (times in steps)
    and :class:`MidiMessage` control changes (``tick`` in steps). Each note
    becomes an on/off pair; overlapping same-pitch notes are merged by
    clamping the earlier off to the next on (the engines are monophonic, so
    this is a safety rail, not a feature).
    """
    if steps_per_beat < 1:
        raise ValueError(f"steps_per_beat must be >= 1, got {steps_per_beat}")
    ch = channel
    if not 0 <= ch <= 15:
        raise ValueError(f"channel {ch} outside 0..15")

    last_t = None
    raw: list[tuple[int, int, str, int, int]] = []  # (tick, order, kind, d1, d2)
    pending_offs: dict[int, list[tuple[int, int]]] = {}  # pitch -> (raw idx, own on tick)
    for ev in events:
        t = ev.t if isinstance(ev, NoteEvent) else ev.tick
        if last_t is not None and t < last_t:
            raise ValueError("events must be time-sorted")
        last_t = t
        if isinstance(ev, NoteEvent):
            pitch = _check_7bit("pitch", ev.pitch)
            vel = ev.velocity
            if not 1 <= vel <= 127:
                raise ValueError(f"velocity {vel} outside 1..127")
            if ev.duration_steps <= 0:
                raise ValueError("duration_steps must be positive")
            on = _step_to_tick(ev.t, steps_per_beat)
            off = max(_step_to_tick(ev.t + ev.duration_steps, steps_per_beat), on + 1)
            for i, own_on in pending_offs.get(pitch, []):
                clamped = max(on, own_on + 1)
                if raw[i][0] > clamped:
                    raw[i] = (clamped, *raw[i][1:])
            raw.append((on, 1, NOTE_ON, pitch, vel))
            raw.append((off, 0, NOTE_OFF, pitch, 0))
            pending_offs.setdefault(pitch, []).append((len(raw) - 1, on))
        elif isinstance(ev, MidiMessage) and ev.kind == CONTROL_CHANGE:
            raw.append(
                (
                    _step_to_tick(ev.tick, steps_per_beat),
                    1,
                    CONTROL_CHANGE,
                    _check_7bit("controller", ev.data1),
                    _check_7bit("value", ev.data2),
                )
            )
        else:
            raise ValueError(f"unsupported event {ev!r}")

    # offs sort before ons at the same tick so merged notes retrigger cleanly
    raw.sort(key=lambda e: (e[0], e[1]))

    status = {NOTE_ON: 0x90 | ch, NOTE_OFF: 0x80 | ch, CONTROL_CHANGE: 0xB0 | ch}
    track = bytearray()
    cursor = 0
    for tick, _, kind, d1, d2 in raw:
        track += _var_len(tick - cursor)
        track += bytes((status[kind], d1, d2))
        cursor = tick
    track += b"\x00\xff\x2f\x00"  # end of track

    return _HEADER + b"MTrk" + struct.pack(">I", len(track)) + bytes(track)


def write_smf(events, steps_per_beat: int, path, channel: int = 0) -> None:
    with open(path, "wb") as f:
        f.write(events_to_smf(events, steps_per_beat, channel=channel))


def lfo_to_cc_stream(samples, channel: int = 0, controller: int = 1) -> list[MidiMessage]:
    """CC messages for a sample stream with run-length suppression.

    The first sample is always emitted; afterwards only samples whose CC
    value differs from the last emitted one produce a message.
    """
    _check_7bit("controller", controller)
    if not 0 <= channel <= 15:
        raise ValueError(f"channel {channel} outside 0..15")
    out: list[MidiMessage] = []
    last = None
    for s in samples:
        if s.cc != last:
            out.append(
                MidiMessage(
                    kind=CONTROL_CHANGE,
                    channel=channel,
                    data1=controller,
                    data2=_check_7bit("cc value", s.cc),
                    tick=s.t,
                )
            )
            last = s.cc
    return out
