"""
Driving the command line end to end
===================================

Everything the library does is reachable from `relieforge convert`,
`inspect`, and `preview`. This script shells out the way a build
pipeline would, and shows the machine-readable bits: the JSON report on
stdout, diagnostics on stderr, and the exit code.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

CLI = [sys.executable, "-m", "relieforge"]


def run(*args):
    return subprocess.run([*CLI, *map(str, args)], capture_output=True, text=True)


work = Path(tempfile.mkdtemp(prefix="relieforge-demo-"))

# A 6x6 PGM logo: light field, dark ring.
pixels = [[255] * 6 for _ in range(6)]
for i in range(1, 5):
    for j in range(1, 5):
        pixels[i][j] = 0
for i in (2, 3):
    for j in (2, 3):
        pixels[i][j] = 200
logo = work / "ring.pgm"
body = "\n".join(" ".join(map(str, row)) for row in pixels)
logo.write_text(f"P2\n6 6\n255\n{body}\n")

# convert: image -> STL, report on stdout
proc = run("convert", logo, "-o", work / "ring.stl", "--report", work / "report.json")
print(f"convert exit code: {proc.returncode}")
print("stderr:", proc.stderr.strip())
report = json.loads(proc.stdout)
print(f"report: {report['triangles']} triangles, bbox {report['bbox_mm']}")

# inspect: re-measure the file we just wrote
proc = run("inspect", work / "ring.stl")
print(f"\ninspect exit code: {proc.returncode}")
measured = json.loads(proc.stdout)
print(f"watertight after round trip: {measured['watertight']}")

# preview: quick-look PGM of the height field (white = tall)
proc = run("preview", logo, "-o", work / "preview.pgm")
print(f"\npreview exit code: {proc.returncode}, wrote {work / 'preview.pgm'}")

# --pad skirts the relief with a zero border. The flattened rim makes
# collapsed wall quads expected, so they are skipped, counted, and
# flagged -- and the run still succeeds.
proc = run("convert", logo, "-o", work / "padded.stl", "--pad")
padded = json.loads(proc.stdout)
print(f"\n--pad exit code: {proc.returncode}")
print(f"degenerate walls skipped: {padded['degenerate']}")
for w in padded["warnings"]:
    print(f"warning: {w}")

# Failures are exit codes, not tracebacks.
proc = run("convert", work / "missing.pgm", "-o", work / "x.stl")
print(f"\nmissing input -> exit {proc.returncode}: {proc.stderr.strip()}")
