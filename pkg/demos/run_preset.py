"""Simulate the shipped childhood-disease scenario and watch the block
structure settle.

The joint system tracks the usual four compartments plus, inside each,
the split by how many infections an individual has accumulated. Run 25
years, then check two things against theory: the macro infectious
fraction should sit on its endemic value, and adjacent blocks should be
related by the geometric ratio phi.
"""

import numpy as np

from seirstrat import preset_scenario, solve_endemic
from seirstrat.cli import run_scenario


def main():
    cfg = preset_scenario(n=10, years=25.0)
    summary = run_scenario(cfg, ".")
    eq = solve_endemic(cfg.params)

    final = summary.trajectory.final
    print(f"wrote {summary.csv_paths[0]} ({summary.samples} samples)")
    print(f"conservation defect over the run: {summary.conservation_defect:.3e}")
    print()
    print(f"I(25y)    = {final[2]:.12f}")
    print(f"I_star    = {eq.i_star:.12f}")
    print(f"gap       = {abs(final[2] - eq.i_star):.3e}")
    print()

    # block k lives at columns 4 + 4*(k-1) .. 4 + 4*k - 1, order S E I R
    i_blocks = np.array([final[4 + 4 * k + 2] for k in range(cfg.truncation)])
    print("infectious mass by reinfection count (block i: fraction, ratio to previous):")
    for k, v in enumerate(i_blocks, start=1):
        ratio = "" if k == 1 else f"   {i_blocks[k - 1] / i_blocks[k - 2]:.6f}"
        print(f"  block {k:2d}: {v:.6e}{ratio}")
    print(f"theory says every ratio tends to phi = {eq.phi:.6f}")
    print("(the first blocks sit on phi already; the deepest ones still carry")
    print(" the filling wave, 25 years in people average about a dozen infections)")
    print()
    print(f"mass beyond the {cfg.truncation} tracked blocks: {summary.tail_mass:.4f}")
    print("(the preset waning is fast, so people rack up many reinfections;")
    print(" raise n or lower omega to shrink the tail)")


if __name__ == "__main__":
    main()
