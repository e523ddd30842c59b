"""
A small falsification campaign
==============================

A campaign sweeps exponents, dimensions, Hadamard powers and point families,
keeps every eigenvalue as a replayable record, and reports an interval for
the smallest exponent at which positivity is lost. Records below carry the
configuration reference needed to rebuild their matrix.
"""

import tempfile

from posdef_lab import Generator
from posdef_lab.search import CampaignPlan, ConfigFamily, run_campaign

plan = CampaignPlan(
    r_grid=(4.5, 6.0, 8.0),
    n_list=(1, 2),
    alpha_grid=(0.01, 1.0),
    families=(ConfigFamily(Generator.RANDOM_GAUSSIAN, 30, (0.5, 2.0), (0, 1)),
              ConfigFamily(Generator.SCALED_LATTICE, 400, (2.0**-4,))),
    bisect_iters=4,
)

with tempfile.TemporaryDirectory() as out:
    summary = run_campaign(plan, out)

for key in ("records", "violations", "theory_violations", "bracket", "bracket_source"):
    print(f"{key:18s} {summary[key]}")
