"""Tour of the permutation-symmetric state space.

N spin-1/2 particles nominally live in a 2^N-dimensional Hilbert space, but
every operator in this package (collective spins, the field Hamiltonian, the
local dephasing channel) treats the particles identically, so the dynamics
never leaves the direct sum of total-spin sectors. This demo prints the
sector layout, the quadratic growth of the reduced dimension, and the block
structure of the collective operators living on it.
"""

import numpy as np

from spinsense import build_space, collective_operator, dicke_dimension

# --- sector layout for a small ensemble ------------------------------------

n = 6
space = build_space(n)
print(f"N = {n}: reduced dimension {space.total_dim}, "
      f"product dimension {2 ** n}")
print(f"{'j':>5} {'dim':>4} {'offset':>7} {'multiplicity':>13}")
for s in space.sectors:
    print(f"{s.twoj / 2:5.1f} {s.dim:4d} {s.offset:7d} {s.multiplicity:13d}")

# multiplicities weighted by block size recover the full space exactly
total = sum(s.multiplicity * s.dim for s in space.sectors)
print(f"sum of multiplicity * (2j+1) = {total} = 2^{n}\n")

# --- dimension growth -------------------------------------------------------

print(f"{'N':>4} {'2^N':>12} {'d_D':>6} {'ratio':>10}")
for n in (4, 8, 12, 16, 20, 24, 28):
    d = dicke_dimension(n)
    print(f"{n:4d} {2 ** n:12d} {d:6d} {2 ** n / d:10.1f}")
print()

# --- collective operators are block diagonal --------------------------------

space = build_space(4)
jx = collective_operator(space, "x")
jy = collective_operator(space, "y")
jz = collective_operator(space, "z")
print(f"N = 4 block sizes: {[b.shape[0] for b in jx.blocks]}")

# su(2) holds block by block, so it holds on the whole reduced space
worst = 0.0
for bx, by, bz in zip(jx.blocks, jy.blocks, jz.blocks):
    worst = max(worst, float(np.max(np.abs(bx @ by - by @ bx - 1j * bz))))
print(f"max |[Jx, Jy] - i Jz| over blocks: {worst:.2e}")

# Casimir is constant inside each sector: j(j+1) on the diagonal
casimir = sum((op @ op).to_dense() for op in (jx, jy, jz))
for s in space.sectors:
    block = casimir[s.offset:s.offset + s.dim, s.offset:s.offset + s.dim]
    j = s.twoj / 2.0
    dev = float(np.max(np.abs(block - j * (j + 1) * np.eye(s.dim))))
    print(f"sector j={j}: |J^2 - j(j+1)| = {dev:.2e}")
