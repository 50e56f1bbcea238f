"""Scheme recommendation and the Doppler crossover, via the library API
(the CLI subcommands select and crossover wrap exactly these calls)."""

import json

from minislot.cli import Scenario, doppler_crossover, select_scheme

# one operating point, all three schemes
for fd in (0.01, 0.15):
    sc = Scenario.from_json({
        "fdTs": fd, "gammaDb": 4.0, "B": 64, "nSamples": 100_000, "seed": 3,
    })
    rec = select_scheme(sc)
    ranked = ", ".join(f"{s}={e:.2e}" for s, e in rec.ranked)
    print(f"fdTs={fd}: chose {rec.chosen}  ({ranked})")
    print(f"  {rec.rationale}")

# where does the pilot-assisted advantage end?
sc = Scenario.from_json({
    "schemes": ["PA", "FDDi"],
    "fdTs": [round(0.01 * k, 2) for k in range(1, 11)],
    "gammaDb": 5.4, "B": 64, "nSamples": 200_000, "seed": 3,
})
rep = doppler_crossover(sc)
print(f"\nPA vs FDDi at {rep['gammaDb']} dB: crossover at "
      f"fdTs = {rep['crossover']}")
print(json.dumps({s: [f"{e:.2e}" for e in v]
                  for s, v in rep["epsilon"].items()}, indent=2))
