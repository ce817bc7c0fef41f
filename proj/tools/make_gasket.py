#!/usr/bin/env python3
# Copyright 2026 The arraywos Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes data/gasket.json: a four-cylinder head gasket with 50 holes.

Layout: an octagonal outer outline, four bores on the x axis, two rows of
small coolant/oil holes above and below the bores, oil-return holes in the
cusps between bores, and a few small holes in the bore ligaments.  The
evaluation point (0.240999, 0.3) sits just above the third bore, roughly
equidistant from the bore, the outline, a coolant hole and an oil hole.
"""

import json
import math
import sys

TEMPS = {"coolant": 90.0, "oil_return": 110.0, "outer": 120.0, "oil": 130.0, "bore": 160.0}

outline = [
    [-0.95, -0.45], [0.95, -0.45], [0.99, -0.41], [0.99, 0.41],
    [0.95, 0.45], [-0.95, 0.45], [-0.99, 0.41], [-0.99, -0.41],
]

holes = []  # (x, y, r, label)
bore_x = [-0.679, -0.219, 0.241, 0.701]
for x in bore_x:
    holes.append((x, 0.0, 0.19, "bore"))

# Upper and lower rows, 0.14 apart, aligned on the third bore.
# The upper slot directly above the third bore is left open for z*.
for j in range(-8, 5):
    x = 0.241 + 0.14 * j
    if j != 0:
        holes.append((x, 0.33, 0.025, "oil" if j % 4 == 1 else "coolant"))
    holes.append((x, -0.33, 0.025, "oil_return" if j % 2 else "coolant"))

# Cusps between and beyond the bores.
for x in [-0.93, -0.449, 0.011, 0.471, 0.95]:
    holes.append((x, 0.215, 0.025, "oil_return"))
    holes.append((x, -0.215, 0.025, "oil_return"))

# Ligaments between bores and the two ends.
for x in [-0.449, 0.011, 0.471]:
    holes.append((x, 0.0, 0.018, "oil"))
for x in [-0.935, 0.945]:
    holes.append((x, 0.0, 0.025, "oil"))

# Small coolant passages along the lower edge.
for x in [-0.9, -0.6, -0.3, 0.0, 0.3, 0.6]:
    holes.append((x + 0.05, -0.405, 0.015, "coolant"))

assert len(holes) == 50, len(holes)


def seg_dist(p, a, b):
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / (dx * dx + dy * dy)
    t = min(1.0, max(0.0, t))
    return math.hypot(p[0] - ax - t * dx, p[1] - ay - t * dy)


def outline_dist(p):
    n = len(outline)
    return min(seg_dist(p, outline[i], outline[(i + 1) % n]) for i in range(n))


# Clearances: every hole strictly inside the outline, no two holes touching.
for i, (x, y, r, _) in enumerate(holes):
    assert outline_dist((x, y)) - r > 0.01, (i, x, y)
    assert abs(x) < 0.99 and abs(y) < 0.45
    for j in range(i):
        x2, y2, r2, _ = holes[j]
        assert math.hypot(x - x2, y - y2) - r - r2 > 0.01, (i, j)

zs = (0.240999, 0.3)
near = sorted((math.hypot(zs[0] - x, zs[1] - y) - r, lab) for x, y, r, lab in holes)
near.append((outline_dist(zs), "outer"))
near.sort()
print("distances from z*:", near[:5], file=sys.stderr)

scene = {
    "name": "gasket",
    "dimension": 2,
    "bbox": [[-1.0, -1.0], [1.0, 1.0]],
    "primitives": [{"kind": "polyline", "params": {"points": outline, "closed": True}, "label": "outer"}]
    + [{"kind": "circle", "params": {"center": [x, y], "radius": r}, "label": lab} for x, y, r, lab in holes],
    "boundary_values": TEMPS,
    "source": "none",
    "evaluation_point": list(zs),
    "epsilon": 1e-3,
}

out = sys.argv[1] if len(sys.argv) > 1 else "data/gasket.json"
with open(out, "w") as f:
    json.dump(scene, f, indent=1)
    f.write("\n")
