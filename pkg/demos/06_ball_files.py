"""
Saving and reloading ball sets
==============================

Ball sets are JSON-lines files: a header record followed by one record per
ball. Reloading and writing again reproduces the file byte for byte.
"""

import tempfile
from pathlib import Path

from gbgpp import export_balls, fit_apply_minmax, granulate, import_balls, load_dataset

DATA = Path(__file__).resolve().parents[1] / "data"
data, _, params = fit_apply_minmax(load_dataset(DATA / "ecoli.csv"))
result = granulate(data)

with tempfile.TemporaryDirectory() as tmp:
    first = export_balls(result, Path(tmp) / "ecoli.balls.jsonl")
    again = export_balls(import_balls(first), Path(tmp) / "copy.jsonl")
    print(first.read_text().splitlines()[0][:200], "...")
    print("identical after round trip:", first.read_bytes() == again.read_bytes())

print("normalization used:", {k: [round(v, 3) for v in vals] for k, vals in params.to_dict().items()})
