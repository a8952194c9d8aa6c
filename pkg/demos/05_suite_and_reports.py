"""
Running the suite and exporting examples
========================================

The suite samples points, draws typed random vectors per relation and
aggregates residuals into a report.  Gallery entries can be written out as
definition files and read back.
"""

import json
import tempfile
from pathlib import Path

from subcurv import parse_submersion, validate_submersion
from subcurv.gallery import export_text
from subcurv.suite import RunConfig, render, run_suite

report = run_suite(RunConfig(examples=["hopf"], points=10, families=("oneill", "scalar")))
print(render(report, "text"))

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "warped.sub"
    path.write_text(export_text("warped_interval_s1"))
    print(path.read_text())
    spec = parse_submersion(path.read_text())
    for check in validate_submersion(spec):
        print(check.name, "pass" if check.passed else "FAIL", check.detail)
    rep = run_suite(RunConfig(files=[str(path)], points=3, families=("ricci",)))
    print(json.dumps(rep["relations"], indent=1))
