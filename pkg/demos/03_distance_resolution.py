"""How finely the array separates users in range.

The half-power distance r_hp sets the scale: well inside it the focus is
sharp in both directions, and beyond it the gain never falls to one half on
the far side.
"""

import math

from modxl import ArrayGeometry, PolarLocation, distance_resolution, half_power_distance
from modxl.beampattern import numeric_distance_resolution

g = ArrayGeometry.reference()
for th in (0.0, math.pi / 6, math.pi / 3):
    print(f"theta' = {th:.3f} rad: r_hp = {half_power_distance(g, th):7.1f} m")

print("\n  r' [m]   analytic (+/-) [m]     numeric (+/-) [m]")
for rp in (50.0, 100.0, 200.0, 400.0, 1500.0):
    focus = PolarLocation(rp, 0.0)
    plus, minus = distance_resolution(g, focus)
    nplus, nminus = numeric_distance_resolution(g, focus, "exact", 600)
    print(f"  {rp:6.0f}   {plus:8.1f} / {minus:6.1f}     {nplus:8.1f} / {nminus:6.1f}")
