"""Render free-running LFO waveforms and hunt for periodic ones.

A fixed random network run in closed loop settles into some attractor:
a fixed point, a limit cycle, or something messier. This script renders
a few hand-picked configurations, measures their periods, then lets
the random search find oscillators on its own.

Run:  python3 demos/lfo_waveforms.py
"""

import csv
from pathlib import Path

import numpy as np

from reservoirmidi import (
    NetworkConfig,
    Scales,
    dominant_period,
    render_lfo,
    search_waveforms,
)

OUT = Path(__file__).resolve().parent / "out"
OUT.mkdir(exist_ok=True)


def describe(name, values):
    period = dominant_period(values)
    tail = values[len(values) // 2 :]
    span = float(np.max(tail) - np.min(tail))
    print(f"  {name:<24} settled span={span:.3f}  period={period if period else 'none'}")


def main():
    config = NetworkConfig(neurons=100, seed=11)

    print("1. A tame network decays to a fixed point.")
    tame = Scales(spectral_radius=0.8, feedback_scale=0.3, leak_rate=0.3)
    describe("rho=0.8 fb=0.3", render_lfo(config, tame, steps=2048))

    print("\n2. Push the spectral radius past 1 and the feedback louder;")
    print("   the fixed point loses stability and cycles appear.")
    for rho, fb in [(1.1, 0.8), (1.25, 1.2), (1.4, 1.5)]:
        scales = Scales(spectral_radius=rho, feedback_scale=fb, leak_rate=0.3)
        describe(f"rho={rho} fb={fb}", render_lfo(config, scales, steps=2048))

    print("\n3. Same dials, different seed: whether it oscillates at all,")
    print("   and at what period, belongs to the seed.")
    lively = Scales(spectral_radius=1.25, feedback_scale=1.2, leak_rate=0.3)
    for seed in (10, 11, 12, 26):
        describe(f"seed={seed}",
                 render_lfo(config, lively, seed=seed, steps=2048))

    print("\n4. Random search over seeds and dials for usable oscillators.")
    hits = list(search_waveforms(max_trials=200, steps=2048))
    print(f"   {len(hits)} periodic configurations found in 200 trials")
    for cfg, scales, waveform, period in hits[:5]:
        span = float(waveform.max() - waveform.min())
        print(f"   seed={cfg.seed:>20} rho={scales.spectral_radius:.2f} "
              f"fb={scales.feedback_scale:.2f} leak={scales.leak_rate:.2f} "
              f"period={period:<4} span={span:.3f}")

    if hits:
        cfg, scales, waveform, period = max(
            hits, key=lambda h: h[2].max() - h[2].min())
        path = OUT / "best_waveform.csv"
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "value"])
            writer.writerows((t, float(v)) for t, v in enumerate(waveform))
        print(f"\n   widest waveform (period {period}) written to {path}")


if __name__ == "__main__":
    main()
