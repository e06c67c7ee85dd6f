"""The full command-line pipeline on a throwaway config.

Writes a config, runs `walk` then `rate` and `tails` through the CLI entry
point, and prints the produced files.  Everything lands in ./demo_results.
The same pipeline at acceptance scale is what the test suite exercises.
"""

import json
import os
import tempfile

from latticewalk.cli import cli_dispatch

out_dir = "demo_results"
config = {
    "dims": {"k1": 1, "k2": 1},
    "diagonal_law": {"alpha": [0.5, -0.5], "widths": 0.2},
    "walk": {"steps": 40, "trials": 500, "seed": 0,
             "record_schedule": list(range(2, 41, 2))},
    "observables": [{"kind": "siegel_count", "radius": 1.5}],
    "output": {"directory": out_dir, "format": "csv"},
}

with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
    json.dump(config, fh)
    cfg_path = fh.name

for args in (["validate", "--config", cfg_path],
             ["walk", "--config", cfg_path],
             ["rate", "--config", cfg_path],
             ["tails", "--config", cfg_path, "--trials", "5000"]):
    code = cli_dispatch(args)
    print(f"latticewalk {' '.join(args[:1])} -> exit {code}")
    assert code == 0

os.unlink(cfg_path)
print("\nproduced files:")
for name in sorted(os.listdir(out_dir)):
    path = os.path.join(out_dir, name)
    with open(path) as fh:
        head = fh.readline().strip()
    print(f"  {path}  ({head})")
