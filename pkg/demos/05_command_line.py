# Driving everything from the command line, and the speedup model.
#
# The same entry point is installed as the `sddmesh` console script; here it
# is called in-process so the output lands next to this script's prints.
import csv
import tempfile
from pathlib import Path

from sddmesh.cli import main
from sddmesh.output import read_mesh
from sddmesh.report import speedup_model

out = Path(tempfile.mkdtemp())

main(["single", "--monitor", "running", "--grid", "29x29", "--out", str(out / "single.mesh"),
      "--svg", str(out / "single.svg")])
main(["sdd", "--monitor", "running", "--grid", "29x29", "--subdomains", "2x2", "--walks", "2000",
      "--scheme", "exponential:1000", "--placement", "optimal", "--seed", "1",
      "--reference", "single", "--csv", str(out / "sdd.csv"), "--out", str(out / "sdd.mesh")])
print(open(out / "sdd.csv").read())

# A saved mesh can be scored later against any reference
main(["quality", "--mesh", str(out / "sdd.mesh"), "--reference", str(out / "single.mesh")])
print("mesh file header:", (out / "sdd.mesh").read_text().splitlines()[0])
print("nodes:", read_mesh(out / "sdd.mesh").mesh.x.shape)

# bench writes one timing row with the modelled speedup
main(["bench", "--monitor", "running", "--grid", "29x29", "--subdomains", "2x2", "--walks", "1000",
      "--placement", "optimal", "--seed", "1", "--csv", str(out / "bench.csv")])
row = next(csv.DictReader(open(out / "bench.csv")))
print({k: row[k] for k in ("mc_points", "t_stoc", "t_sub", "t_1", "s_p")})

# The model on its own: 16 subdomains, 7 points on each of 6 lines
print("S_p =", speedup_model(16, 7, 3, 3, t_mc=0.02, t_1=20.62))
print("free interfaces:", speedup_model(16, 7, 3, 3, t_mc=0.0, t_1=20.62))
