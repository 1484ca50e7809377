"""The file-driven front end: fixtures in, reports out.

Writes the canonical problem files to a temporary directory, runs each one,
and summarizes the reports.  The same flow is available from the shell:

    proxpair fixtures --out fixtures/
    proxpair analyze --spec fixtures/example2-linf.json --out report.json
"""

import json
import os
import tempfile

from proxpair.cli import emit_fixtures, run

with tempfile.TemporaryDirectory() as tmp:
    fdir = os.path.join(tmp, "fixtures")
    written = emit_fixtures(fdir)
    print("canonical fixtures:")
    for path in written:
        print("  ", os.path.basename(path))
    print()
    for path in written:
        name = os.path.basename(path).removesuffix(".json")
        out = os.path.join(tmp, f"{name}-report.json")
        code = run(path, out)
        rep = json.load(open(out))
        ops = ", ".join(t["op"] for t in rep["tasks"])
        print(f"{name}: exit {code}, tasks [{ops}], all certified: {rep['all_certified']}")
        for task in rep["tasks"]:
            if task["op"] == "solve":
                print(f"    best proximity point: {task['x']} (gap to d: {task['gap_to_d']:.2e})")
            if task["op"] == "structure":
                est = task["estimate"]
                print(f"    N_hat = {est['N_hat']:.6f}, c0_hat = {est['c0_hat']:.6f}")
            if task["op"] == "falsify" and task["uc_counterexample"]:
                print(f"    uniqueness-of-approach counterexample found "
                      f"(separation {task['uc_counterexample']['separation']})")
