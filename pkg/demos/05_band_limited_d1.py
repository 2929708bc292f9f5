"""d=1: backscattering amplitudes on the band 2 sqrt(E0) < |p| <= P give a
band-limited image of the point masses."""

from pathlib import Path

import numpy as np

from multipoint.inverse import backscatter_samples, reconstruct_d1
from multipoint.io import load_scene

truth = load_scene(Path(__file__).with_name("scenes") / "d1_pair.json")
e0, pmax, lo, hi = 100.0, 400.0, -2.0, 2.0
dp = np.pi / (4 * (hi - lo))
pos = np.arange(dp, pmax + dp / 2, dp)
pos = pos[pos > 2 * np.sqrt(e0)]
p = np.concatenate([-pos[::-1], pos])
rec = reconstruct_d1(p, backscatter_samples(truth, p), e0, pmax, x_range=(lo, hi))
print(f"{p.size} band samples, resolution pi/P = {np.pi / pmax:.4f}")
for peak in rec.peaks:
    print(f"  peak at x={peak['position']:+.5f}  mass={peak['mass']:.4f}")
print("truth:", truth.points[:, 0], "masses -1/alpha =", np.round(-1 / truth.strengths, 4))
