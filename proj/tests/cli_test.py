# Copyright 2026 qcat contributors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""End-to-end checks of the qcat binary: exit codes, schema validity, reproducibility."""

import json
import os
import subprocess
import sys
import tempfile

import jsonschema

QCAT, SOURCE = sys.argv[1], sys.argv[2]
DATA = os.path.join(SOURCE, "tests", "data")
SCHEMA = json.load(open(os.path.join(SOURCE, "schemas", "report.schema.json")))
VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)

failures = []


def data(name):
    return os.path.join(DATA, name)


def run(args, env=None):
    e = dict(os.environ)
    if env:
        e.update(env)
    return subprocess.run([QCAT] + args, capture_output=True, text=True, env=e)


def check(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        failures.append(what)


def strip_timestamp(text):
    doc = json.loads(text)
    doc.pop("timestamp")
    return json.dumps(doc)


CASES = [
    ("amplify", ["amplify", "--eta0", "0.5", "--rounds", "1"], 0),
    ("amplify joint K=10", ["amplify", "--eta0", "0.3", "--rounds", "10", "--mode", "joint"], 0),
    ("counterexample", ["counterexample", "--eta0", "0.5"], 1),
    ("prepare |+>", ["prepare", "--target", data("plus.json"), "--epsilon", "0.05"], 0),
    ("prepare fixed budget", ["prepare", "--target", data("qutrit_target.json"), "--epsilon", "0.1", "--K", "256",
                              "--L", "16", "--seed", "11"], 0),
    ("prepare short budget", ["prepare", "--target", data("qutrit_target.json"), "--epsilon", "0.3", "--K", "16",
                              "--L", "4"], 1),
    ("quasi-prepare", ["quasi-prepare", "--input", data("sigma_half.json"), "--target", data("qutrit_target.json"),
                       "--epsilon", "0.1", "--seed", "3"], 0),
    ("overlap", ["overlap", "--L", "8", "--m", "1"], 0),
    ("overlap sweep", ["overlap", "--sweep", "64"], 0),
    ("index-sets", ["index-sets", "--input", data("sigma_half.json"), "--target-energies", "0,1,3/2,5/2"], 0),
    ("convert", ["convert", "--input", data("sigma_04.json"), "--target", data("sigma_03.json"), "--channel",
                 data("two_copy_dephasing.json"), "--copies", "2", "--epsilon", "0.02"], 0),
    ("broadcast3", ["broadcast3", "--delta", "0.1"], 0),
    ("reuse", ["reuse", "--K", "2", "--n", "3"], 0),
    ("verify", ["verify", "--suite", "all", "--seed", "7"], 0),
]

outputs = {}
for name, args, code in CASES:
    r = run(args)
    check(r.returncode == code, f"{name}: exit {r.returncode}, expected {code}")
    try:
        doc = json.loads(r.stdout)
    except json.JSONDecodeError:
        check(False, f"{name}: stdout is JSON")
        continue
    errors = sorted(VALIDATOR.iter_errors(doc), key=lambda e: list(e.path))
    check(not errors, f"{name}: report validates against the schema"
          + ("" if not errors else f" ({errors[0].message} at {list(errors[0].path)})"))
    check(doc["passed"] == (code == 0), f"{name}: passed flag matches the exit status")
    outputs[name] = r.stdout

# Identical config and seed give identical reports apart from the timestamp.
for name, args, _ in CASES:
    if name in ("prepare fixed budget", "quasi-prepare", "verify", "amplify"):
        again = run(args)
        check(strip_timestamp(again.stdout) == strip_timestamp(outputs[name]), f"{name}: byte-identical rerun")

amp = json.loads(outputs["amplify"])
check(amp["result"]["eta_sequence"] == [0.5, 0.515625], "amplify --eta0 0.5 --rounds 1 gives [0.5, 0.515625]")

r = run(["prepare", "--target", data("bad_trace.json")])
check(r.returncode == 2, "trace-0.9 density matrix exits 2")
check("trace" in r.stderr, "trace-0.9 diagnostic names the trace")
check("matrix" in r.stderr, "trace-0.9 diagnostic carries the field path")

with tempfile.TemporaryDirectory() as tmp:
    bad = os.path.join(tmp, "bad.json")
    with open(bad, "w") as f:
        f.write('{"label": "S", "energies": [0, 1], "matrix": [[1, 0],')
    r = run(["prepare", "--target", bad])
    check(r.returncode == 2 and "malformed JSON" in r.stderr, "malformed JSON exits 2")

    shape = os.path.join(tmp, "shape.json")
    with open(shape, "w") as f:
        json.dump({"label": "S", "energies": ["0", "1"], "matrix": [[1, 0], [0]]}, f)
    r = run(["prepare", "--target", shape])
    check(r.returncode == 2 and "matrix[1]" in r.stderr, "ragged matrix reports its row path")

    csv = os.path.join(tmp, "eta.csv")
    out = os.path.join(tmp, "eta.json")
    r = run(["amplify", "--eta0", "0.5", "--rounds", "3", "--csv", csv, "--out", out])
    lines = open(csv).read().splitlines()
    check(r.returncode == 0 and lines[0] == "round,eta_recursion,eta_simulated" and len(lines) == 5,
          "amplify writes a CSV eta series")
    check(json.load(open(out))["subcommand"] == "amplify", "--out writes the report file")

r = run(["prepare", "--target", data("plus.json"), "--epsilon", "0.05"], env={"QCAT_DIM_CAP": "8"})
check(r.returncode == 2 and "cap" in r.stderr, "QCAT_DIM_CAP shrinks the cap and planning refuses")

r = run(["verify", "--suite", "nonsense"])
check(r.returncode == 2, "unknown suite exits 2")
r = run(["amplify", "--eta0", "2"])
check(r.returncode == 2, "out-of-range flag exits 2")
r = run(["--help"])
check(r.returncode == 0 and "QCAT_DIM_CAP" in r.stdout, "--help documents QCAT_DIM_CAP")

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
