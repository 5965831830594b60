#!/usr/bin/env python3
"""Regenerate the frozen golden values used by the test suite.

The goldens come from fine (4096-node) radial runs of this package's own
solver with a tightened bisection tolerance; they pin the unit-disk
constant-profile reference points:

  * sup u of the minimal solution at lam = mu = 0.5
  * the critical parameter on the diagonal ray (theta = 1)

Run from the repository root:  python3 tools/make_goldens.py
"""

from memslab import build_radial
from memslab.curve import CurveConfig, extremal_on_ray
from memslab.profiles import constant_profile
from memslab.solver import SolveConfig, minimal_solve

ORACLE_NODES = 4096
ORACLE_RTOL = 1e-4


def main() -> None:
    mesh = build_radial(2, 1.0, ORACLE_NODES)
    one = constant_profile(mesh, 1.0)

    out = minimal_solve(mesh, one, one, 0.5, 0.5, SolveConfig())
    assert out.converged
    print(f"GOLDEN_DISK_SUP_U_HALF = {out.state.u.max()!r}")

    sample = extremal_on_ray(mesh, one, one, 1.0, CurveConfig(rtol=ORACLE_RTOL))
    print(f"GOLDEN_DISK_LAM_STAR = {sample.lam_star!r}")
    print(f"# bracket width {sample.bracket_width:.2e}, "
          f"{sample.iterations_total} solver iterations")


if __name__ == "__main__":
    main()
