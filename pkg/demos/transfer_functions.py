"""
Shaping intensity with piecewise-linear transfer functions
==========================================================

A transfer function turns a normalized pixel intensity in [0, 1] into a
height in millimeters. The built-in "jdrf-relief" preset raises dark
glyphs and keeps the light background as a thin plate.
"""

import numpy as np

from relieforge import (
    ScalarGrid,
    apply,
    parse_transfer_spec,
    preset_jdrf,
    serialize_transfer_spec,
)

tf = preset_jdrf()
print(f"preset: {tf.name}")
print(f"segments: {len(tf.segments)}")
print()

# Sample the whole intensity domain.  Near-white (> 0.9) clamps to the
# plate height, near-black (< 0.25) to the tallest relief, and the
# middle band falls off linearly.
print("intensity -> height factor")
for x in (0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 1.0):
    print(f"  {x:5.2f}   -> {tf.evaluate(x):.4f}")
print()

# The same evaluation is available vectorized; heights scale linearly.
xs = ScalarGrid(np.linspace(0.0, 1.0, 11).reshape(1, -1))
print("vectorized, scale 4 (millimeters):")
print(np.round(apply(tf, xs, scale=4.0).values[0], 3))
print()

# Custom functions load from a tiny text grammar: one segment per line,
# "interval => a*x + b" (or a constant).  Intervals must tile [0,1].
source = """\
# invert: dark stays low, light stands tall
[0.0,0.5) => 0.5
[0.5,1.0] => 2.0*x - 0.5
"""
custom = parse_transfer_spec(source, name="invert")
print(f"parsed {custom.name!r}: f(0.2) = {custom.evaluate(0.2)}, f(1.0) = {custom.evaluate(1.0)}")

# serialize_transfer_spec writes the grammar back out, so a preset can
# be dumped, edited, and reloaded.
print()
print("preset as text:")
print(serialize_transfer_spec(tf))
