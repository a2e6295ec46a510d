"""End-to-end checks of the kahlerflow command-line tool.

usage: cli_test.py <kahlerflow binary> <work dir>
"""

import csv
import json
import shutil
import subprocess
import sys
from pathlib import Path

CLI = sys.argv[1]
WORK = Path(sys.argv[2])
failed = []


def run(*args):
    return subprocess.run([CLI, *args], capture_output=True, text=True)


def check(name, cond, extra=""):
    print(("ok   " if cond else "FAIL ") + name + (f" ({extra})" if extra and not cond else ""))
    if not cond:
        failed.append(name)


def out(name):
    d = WORK / name
    shutil.rmtree(d, ignore_errors=True)
    return d


shutil.rmtree(WORK, ignore_errors=True)
WORK.mkdir(parents=True)

# usage and config errors
check("help exits 0", run("--help").returncode == 0)
check("missing subcommand exits 2", run().returncode == 2)
check("unknown subcommand exits 2", run("frobnicate").returncode == 2)
check("unknown flag exits 2", run("ode", "--bogus").returncode == 2)
check("unknown key exits 2", run("ode", "--set", "bogus=1", "--output", str(out("e1"))).returncode == 2)
check("negative count exits 2", run("ode", "--set", "count=-1", "--output", str(out("e2"))).returncode == 2)
check("missing config file exits 2", run("ode", "--config", str(WORK / "nope.json")).returncode == 2)
bad = WORK / "bad.json"
bad.write_text("{not json")
check("malformed config exits 2", run("ode", "--config", str(bad)).returncode == 2)
check("odd grid exits 2", run("lattice", "--set", "grid_n=15", "--output", str(out("e3"))).returncode == 2)
check("bad expression exits 2",
      run("lattice", "--set", "potential=custom", "--set", "expression=sin(x1", "--output", str(out("e4"))).returncode == 2)

# identities
d = out("ident")
r = run("identities", "--set", "samples=200", "--set", "ricci_samples=2000", "--output", str(d))
check("identities exits 0", r.returncode == 0, r.stderr)
rep = json.loads((d / "identities_report.json").read_text())
check("identities report passes", rep["pass"] is True)
check("identities report has convention version", rep["convention_version"] == "kahlerflow-conventions-1")
check("identities records the config", rep["config"]["samples"] == 200)
d = out("ident_tight")
r = run("identities", "--set", "samples=50", "--set", "tolerances.cancellation=1e-18", "--output", str(d))
check("impossible tolerance exits 1", r.returncode == 1, r.stderr)

# config file, then --set, then --seed
cfg = WORK / "ode.json"
cfg.write_text(json.dumps({"count": 20, "horizon": 0.25, "seed": 3}))
d = out("ode_cfg")
r = run("ode", "--config", str(cfg), "--set", "count=30", "--seed", "11", "--output", str(d))
check("ode with config exits 0", r.returncode == 0, r.stderr)
summ = json.loads((d / "ode_summary.json").read_text())
check("--set beats file", summ["config"]["count"] == 30)
check("--seed beats file", summ["config"]["seed"] == 11)
check("file beats default", summ["config"]["horizon"] == 0.25)
rows = list(csv.reader((d / "ode_runs.csv").open()))
check("ode csv header", rows[0] == ["run_id", "t_min_two_sum", "min_two_sum", "t_min_det", "min_det", "blew_up", "t_blowup"])
check("ode csv rows", len(rows) == 31)
check("ode minima nonnegative", all(float(x[2]) >= -1e-7 and float(x[4]) >= -1e-7 for x in rows[1:]))

# fixed-point override
d = out("ode_ke")
r = run("ode", "--set", "count=1", "--set", 'initial={"R":6,"s":[0,0,0],"M":[[1,0,0],[0,1,0],[0,0,1]],"mu":3}',
        "--output", str(d))
check("KE override exits 0", r.returncode == 0, r.stderr)
row = list(csv.reader((d / "ode_runs.csv").open()))[1]
check("KE minima 2 and 18", abs(float(row[2]) - 2) < 1e-12 and abs(float(row[4]) - 18) < 1e-12, str(row))

# coarse steps: reported as integrator precision, exit 1
d = out("ode_coarse")
r = run("ode", "--set", "count=2000", "--set", "dt=0.5", "--set", "horizon=2", "--set", "scale=3",
        "--set", "mu_min=-5", "--set", "mu_max=5", "--output", str(d))
summ = json.loads((d / "ode_summary.json").read_text())
check("coarse dt exits 1", r.returncode == 1, r.stderr)
check("coarse dt failures are precision failures",
      summ["integrator_precision_failures"] > 0 and summ["violations_two_sum"] == 0 and summ["violations_det"] == 0,
      json.dumps({k: summ[k] for k in ("integrator_precision_failures", "violations_two_sum", "violations_det")}))

# lattice
d = out("lat_zero")
r = run("lattice", "--set", "grid_n=8", "--set", "potential=zero", "--set", "steps=5", "--output", str(d))
check("zero potential exits 0", r.returncode == 0, r.stderr)
rows = list(csv.DictReader((d / "lattice_steps.csv").open()))
check("zero potential steps", len(rows) == 6)
check("zero potential stays flat",
      all(abs(float(x["sup_abs_phi"])) <= 1e-12 and abs(float(x["sup_abs_R"])) <= 1e-12 for x in rows))

d = out("lat_cos")
r = run("lattice", "--set", "grid_n=8", "--set", "steps=20", "--set", "snapshot_every=10", "--output", str(d))
check("cos_x1 exits 0", r.returncode == 0, r.stderr)
summ = json.loads((d / "lattice_summary.json").read_text())
check("cos_x1 decays", summ["sup_abs_phi_strictly_decreasing"] is True)
check("snapshots written", sorted(p.name for p in d.glob("snapshot_*.bin")) ==
      ["snapshot_000000.bin", "snapshot_000010.bin", "snapshot_000020.bin"])
head = (d / "snapshot_000010.bin").read_bytes().split(b"\n", 1)[0]
meta = json.loads(head)
check("snapshot header", meta["N"] == 8 and meta["step"] == 10)

d = out("lat_custom")
r = run("lattice", "--set", "grid_n=8", "--set", "steps=3", "--set", "potential=custom",
        "--set", "expression=0.05*cos(x1+y2)", "--output", str(d))
check("custom potential exits 0", r.returncode == 0, r.stderr)

d = out("lat_bad")
r = run("lattice", "--set", "potential=cos_sum", "--set", "epsilon=5", "--output", str(d))
summ = json.loads((d / "lattice_summary.json").read_text())
check("degenerate metric exits 3", r.returncode == 3)
check("degenerate metric fails at step 0", summ["status"] == "NonPositiveMetric" and summ["failing_step"] == 0)

# determinism
a, b = out("det_a"), out("det_b")
run("ode", "--set", "count=200", "--output", str(a))
run("ode", "--set", "count=200", "--output", str(b))
check("ode csv byte identical", (a / "ode_runs.csv").read_bytes() == (b / "ode_runs.csv").read_bytes())

shutil.rmtree(WORK, ignore_errors=True)
print(f"{len(failed)} failed")
sys.exit(1 if failed else 0)
