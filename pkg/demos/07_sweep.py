"""
Parameter sweeps
================

Load a TOML sweep, run it on several workers and write CSV and JSON reports.
The JSON is byte-identical for any worker count.
"""

import pathlib
import tempfile

from ratdyn import emit_report, load_sweep_spec, run_sweep

config = pathlib.Path(__file__).resolve().parent.parent / "configs" / "gas_166_grid.toml"
spec = load_sweep_spec(config)
result = run_sweep(spec, parallelism=2)
print(result.totals)

out = pathlib.Path(tempfile.mkdtemp())
emit_report(result, "csv", out / "sweep.csv")
emit_report(result, "json", out / "sweep.json")
print((out / "sweep.csv").read_text().splitlines()[:3])
