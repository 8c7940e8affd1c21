"""Phase-space portraits of the probe states used throughout.

The Husimi function projects a collective state onto spin-coherent
states, giving a density on the sphere. The two probes of interest look
very different there: a GHZ state is two antipodal spots (its usefulness
lives in the invisible coherence between them), while the normalized sum
of GHZ states along x, y and z shows six lobes along the Cartesian
directions, the geometry that keeps all three field components visible
at once.

Maps print as ASCII density; with matplotlib installed a PNG with the
full-resolution maps is written next to this script as well.
"""

import math

import numpy as np

from spinsense import (build_space, ghz_state, husimi_grid, husimi_map,
                       husimi_normalization, simultaneous_probe)

N = 40
SHAPE = (181, 360)
CHARS = " .:-=+*#%@"


def ascii_map(q, rows=21, cols=60):
    """Block-average a map down to a character raster."""
    rb = np.array_split(np.arange(q.shape[0]), rows)
    cb = np.array_split(np.arange(q.shape[1]), cols)
    out = []
    top = q.max()
    for rr in rb:
        line = ""
        for cc in cb:
            v = q[np.ix_(rr, cc)].mean() / top
            line += CHARS[min(int(v ** 0.5 * (len(CHARS) - 1) + 0.5),
                              len(CHARS) - 1)]
        out.append(line)
    return "\n".join(out)


space = build_space(N)
theta, phi = husimi_grid(SHAPE)
portraits = [
    ("GHZ along z", ghz_state(space, "z")),
    ("sum of GHZ along x, y, z", simultaneous_probe(space)),
]

maps = []
for label, state in portraits:
    q = husimi_map(state, SHAPE)
    maps.append((label, q))
    norm = husimi_normalization(q, N + 1)
    print(f"{label}   (N = {N}, quadrature norm {norm:.6f})")
    print("theta: 0 (top, +z) to pi (bottom, -z); phi: 0 to 2 pi left to right")
    print(ascii_map(q))
    # cluster the near-maximal pixels by the axis direction they point at
    lobes = set()
    for i, j in np.argwhere(q > 0.85 * q.max()):
        v = (math.sin(theta[i]) * math.cos(phi[j]),
             math.sin(theta[i]) * math.sin(phi[j]),
             math.cos(theta[i]))
        lobes.add(tuple(int(round(c)) for c in v))
    names = {(1, 0, 0): "+x", (-1, 0, 0): "-x", (0, 1, 0): "+y",
             (0, -1, 0): "-y", (0, 0, 1): "+z", (0, 0, -1): "-z"}
    print(f"lobe directions: {' '.join(sorted(names[d] for d in lobes))}")
    print()

# the GHZ portrait is blind to the branch coherence: the mixed state
# (|up><up| + |down><down|)/2 would produce the same two spots

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not installed, skipping the PNG")
else:
    fig, axes = plt.subplots(1, 2, figsize=(11, 3.2), layout="constrained")
    for ax, (label, q) in zip(axes, maps):
        im = ax.imshow(q, extent=(0.0, 2.0 * math.pi, math.pi, 0.0),
                       aspect="auto", cmap="inferno")
        ax.set_title(f"{label}, N = {N}")
        ax.set_xlabel("phi")
        ax.set_ylabel("theta")
        fig.colorbar(im, ax=ax, label="Q")
    out = __file__.replace(".py", ".png")
    fig.savefig(out, dpi=130)
    print(f"wrote {out}")
