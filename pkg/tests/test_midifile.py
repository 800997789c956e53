import numpy as np
import pytest

from reservoirmidi.arp import NoteEvent, render_arp
from reservoirmidi.lfo import LfoSample, value_to_cc
from reservoirmidi.midifile import TPQN, events_to_smf, lfo_to_cc_stream, write_smf
from reservoirmidi.reservoir import NetworkConfig, Scales
from smf_parser import cc_multiset, note_multiset, parse_smf

HEADER = bytes.fromhex("4d546864000000060000000101e0")


def _note(t, pitch, vel=100, dur=1.0, index=0):
    return NoteEvent(t=t, index=index, pitch=pitch, velocity=vel, duration_steps=dur)


class TestEventsToSmf:
    def test_empty_event_list_is_a_valid_file(self):
        data = events_to_smf([], 4)
        assert data.startswith(HEADER)
        parsed = parse_smf(data)
        assert parsed.format == 0
        assert parsed.ntrks == 1
        assert parsed.division == TPQN
        assert parsed.events == []

    def test_single_quarter_note(self):
        data = events_to_smf([_note(0, 60, vel=100, dur=4.0)], 4)
        assert note_multiset(parse_smf(data)) == [
            (0, "on", 0, 60, 100),
            (480, "off", 0, 60, 0),
        ]

    def test_header_declares_480_ticks_per_quarter(self):
        data = events_to_smf([_note(0, 72)], 4)
        assert data[12] == 0x01 and data[13] == 0xE0

    def test_note_on_bytes_verbatim(self):
        data = events_to_smf([_note(0, 60, vel=100, dur=4.0)], 4)
        assert bytes([0x90, 0x3C, 0x64]) in data
        assert bytes([0x80, 0x3C, 0x00]) in data

    def test_every_on_pairs_with_a_strictly_later_off(self):
        events = [_note(t, 60 + (t % 3) * 2, dur=0.8) for t in range(40)]
        notes = note_multiset(parse_smf(events_to_smf(events, 4)))
        open_notes = {}
        for tick, kind, _, pitch, _ in notes:
            if kind == "on":
                assert pitch not in open_notes
                open_notes[pitch] = tick
            else:
                assert pitch in open_notes
                assert tick > open_notes.pop(pitch)
        assert not open_notes

    def test_same_pitch_overlap_is_merged(self):
        events = [_note(0, 60, dur=3.0), _note(1, 60, dur=1.0)]
        notes = note_multiset(parse_smf(events_to_smf(events, 4)))
        # first off clamped from tick 360 back to the second on at tick 120
        assert notes == [
            (0, "on", 0, 60, 100),
            (120, "off", 0, 60, 0),
            (120, "on", 0, 60, 100),
            (240, "off", 0, 60, 0),
        ]

    def test_nonzero_channel(self):
        data = events_to_smf([_note(0, 64)], 4, channel=9)
        notes = note_multiset(parse_smf(data))
        assert all(ch == 9 for _, _, ch, _, _ in notes)

    def test_long_deltas_encode_as_multibyte_vlq(self):
        # delta 128 needs two VLQ bytes, 100000 needs three
        for t, dur in ((2, 1.0), (1000, 2.0)):
            data = events_to_smf([_note(0, 60, dur=0.5), _note(t, 62, dur=dur)], 1)
            notes = note_multiset(parse_smf(data))
            assert (t * TPQN, "on", 0, 62, 100) in notes

    def test_tick_rounding_is_half_up(self):
        # 1 step at 7 steps/beat = 68.57 ticks -> 69
        data = events_to_smf([_note(1, 60, dur=1.0)], 7)
        notes = note_multiset(parse_smf(data))
        assert notes[0] == (69, "on", 0, 60, 100)
        assert notes[1] == (137, "off", 0, 60, 0)  # 2 steps -> 137.14 -> 137

    def test_unsorted_events_rejected(self):
        with pytest.raises(ValueError):
            events_to_smf([_note(5, 60), _note(2, 62)], 4)

    @pytest.mark.parametrize(
        "event",
        [
            _note(0, 128),
            _note(0, 60, vel=0),
            _note(0, 60, vel=200),
            _note(0, 60, dur=0.0),
        ],
    )
    def test_out_of_range_fields_rejected(self, event):
        with pytest.raises(ValueError):
            events_to_smf([event], 4)

    def test_bad_grid_and_channel_rejected(self):
        with pytest.raises(ValueError):
            events_to_smf([], 0)
        with pytest.raises(ValueError):
            events_to_smf([], 4, channel=16)

    def test_rendered_arpeggio_roundtrips(self):
        cfg = NetworkConfig(neurons=25, feedback_dim=4, output_dim=4, seed=9)
        events = render_arp(
            cfg, Scales(spectral_radius=1.2), rng_seed=2, pitches=[60, 64, 67, 72], steps=200
        )
        data = events_to_smf(events, 4)
        notes = note_multiset(parse_smf(data))
        ons = [(tick, pitch, vel) for tick, kind, _, pitch, vel in notes if kind == "on"]
        expected = sorted(
            (round(e.t * TPQN / 4), e.pitch, e.velocity) for e in events
        )
        assert ons == expected
        assert len(notes) == 2 * len(events)

    def test_write_smf_equals_bytes(self, tmp_path):
        events = [_note(0, 60), _note(1, 64)]
        path = tmp_path / "out.mid"
        write_smf(events, 4, path)
        assert path.read_bytes() == events_to_smf(events, 4)


class TestLfoToCcStream:
    def _samples(self, values):
        return [LfoSample(t=i, value=v, cc=value_to_cc(v)) for i, v in enumerate(values)]

    def test_constant_stream_collapses_to_one_message(self):
        msgs = lfo_to_cc_stream(self._samples([0.5] * 100))
        assert len(msgs) == 1
        assert msgs[0].data2 == 64

    def test_alternating_extremes_never_suppressed(self):
        msgs = lfo_to_cc_stream(self._samples([0.0, 1.0] * 50))
        assert len(msgs) == 100
        assert [m.data2 for m in msgs[:4]] == [0, 127, 0, 127]

    def test_full_ramp_emits_each_cc_value_once(self):
        msgs = lfo_to_cc_stream(self._samples(np.linspace(0.0, 1.0, 256)))
        assert len(msgs) == 128
        assert [m.data2 for m in msgs] == list(range(128))

    def test_messages_carry_channel_and_controller(self):
        msgs = lfo_to_cc_stream(self._samples([0.2, 0.9]), channel=3, controller=74)
        assert all(m.channel == 3 and m.data1 == 74 for m in msgs)

    def test_cc_stream_roundtrips_through_smf(self):
        samples = self._samples([0.1, 0.4, 0.4, 0.9, 0.2])
        msgs = lfo_to_cc_stream(samples)
        data = events_to_smf(msgs, 4)
        ccs = cc_multiset(parse_smf(data))
        assert len(ccs) == len(msgs)
        assert [v for _, _, _, v in ccs] == [m.data2 for m in msgs]
