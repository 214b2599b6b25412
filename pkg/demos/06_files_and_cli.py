"""Model files, experiment specs, and the command line.

Everything the library does is reachable through the `oomlab` command; this
script drives it in-process and shows the file formats it consumes.
"""

import json
import os
import tempfile

import oomlab as ol
from oomlab.cli import main
from oomlab.model_io import dumps_canonical, save_model

workdir = tempfile.mkdtemp(prefix="oomlab_demo_")
print("working in", workdir)

# Model files are strict JSON with a type tag. Write two coins and a mixture
# referencing them by relative path.
save_model(ol.bernoulli(0.2), os.path.join(workdir, "coin02.json"))
save_model(ol.bernoulli(0.7), os.path.join(workdir, "coin07.json"))
with open(os.path.join(workdir, "mix.json"), "w") as fh:
    fh.write(dumps_canonical({
        "type": "mixture",
        "parts": [
            {"weight": 0.5, "path": "coin02.json"},
            {"weight": 0.5, "path": "coin07.json"},
        ],
    }))
print("\ncoin02.json:")
print(open(os.path.join(workdir, "coin02.json")).read())

# The CLI returns the documented exit codes: 0 ok/PASS, 1 FAIL/invalid,
# 2 usage or schema error, 3 inconclusive.
print("eval --word 1 on the mixture:")
code = main(["eval", "--model", os.path.join(workdir, "mix.json"), "--word", "1"])
print("exit code:", code)

print("\ndimension of the mixture:")
code = main(["dim", "--model", os.path.join(workdir, "mix.json"), "--max-level", "3"])
print("exit code:", code)

# Experiment specs reference model files and pick a harness.
spec_path = os.path.join(workdir, "additivity.json")
with open(spec_path, "w") as fh:
    fh.write(dumps_canonical({
        "experiment": "additivity",
        "name": "demo_additivity",
        "parts": [
            {"weight": 0.5, "path": "coin02.json"},
            {"weight": 0.5, "path": "coin07.json"},
        ],
        "max_level": 3,
    }))
print("\nexperiment run (writes report.json and points.csv):")
code = main(["experiment", "run", spec_path, "--out-dir", workdir, "--csv"])
print("exit code:", code)
report = json.load(open(os.path.join(workdir, "report.json")))
print("verdict on disk:", report["verdict"])
