"""Grating lobes of a modular array in the far field.

Four modules of four half-wavelength elements, with modules spaced 13
element pitches apart, span the aperture of a 52-element array while using
only 16 elements. The price is a comb of grating lobes.
"""

import numpy as np

from modxl import ArrayGeometry, grating_lobe_directions, pattern_ff_ff
from modxl.beampattern import angular_resolution, detect_grating_lobes

g = ArrayGeometry(N=4, M=4, Gamma=13, wavelength=0.1256)
coll = g.collocated()
print(f"modular:    {g.size} elements, aperture {g.aperture:.3f} m")
print(f"collocated: {coll.size} elements, aperture {coll.aperture:.3f} m")

# The main lobe narrows in proportion to the aperture.
print(f"\nhalf main-lobe width, modular:    {angular_resolution(g):.4f}")
print(f"half main-lobe width, collocated: {angular_resolution(g, collocated=True):.4f}")

# Grating lobes repeat every 1/(Gamma d_bar) in sin-angle, scaled by the
# pattern of a single module.
delta = np.linspace(-2, 2, 4001)
pos, weighted, raw = detect_grating_lobes(g, delta)
print(f"\n{len(pos)} grating lobes in [-2, 2]; predicted spacing "
      f"{1 / (g.Gamma * g.d_bar):.5f}")
for p, h in zip(pos[pos > 0][:5], raw[pos > 0][:5]):
    print(f"  delta = {p:+.4f}  gain = {h:.3f}")
print("predicted directions:", np.round(grating_lobe_directions(g)[:6], 4), "...")

# The collocated array with the same element count has no such lobes. Its
# pattern has period 2 in sin-angle, so the ends of the grid are excluded.
inner = delta[(np.abs(delta) > 0.125) & (np.abs(delta) < 1.875)]
side = pattern_ff_ff(coll, inner).max()
print(f"\ncollocated peak sidelobe: {side:.3f}")
