"""
Command line pipeline
=====================

Write a configuration, classify the group, run the continuation and
certify one of the written meshes, all through the ``cmclab`` entry point.
"""
import json
import tempfile
from pathlib import Path

from cmclab.cli import main

work = Path(tempfile.mkdtemp())
config = work / "berger.toml"
config.write_text(
    f"""
[group]
c = [2.0, 2.0, 1.0]

[mesh]
level = 3
coarse_level = 3

[continuation]
H_start = 20.0
H_targets = [1.0, 0.0]

[output]
directory = "{work / 'out'}"
"""
)
print("classify exit code", main(["classify", str(config)]))
print("run exit code", main(["run", str(config)]))
report = json.loads((work / "out" / "certificates.json").read_text())
for sphere in report["spheres"]:
    if sphere["recorded"]:
        print(f"H={sphere['H']}: index/nullity {sphere['jacobi']['index']}/{sphere['jacobi']['nullity']}, files {sphere['mesh_files']}")
mesh = sorted((work / "out").glob("*.off"))[0]
print("certify exit code", main(["certify", str(mesh), str(config)]))
