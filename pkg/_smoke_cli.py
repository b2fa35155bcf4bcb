import io, json, sys, contextlib, os, tempfile

from wallx.cli import (cmd_hypercube, cmd_ltensor, cmd_refinements, cmd_fss,
                       cmd_tables, cmd_verify, main, _single_factor_checks,
                       _pair_checks)
from wallx.corpus import random_strict_module, random_module
from wallx.galois import make_skeleton


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()

# --- law batteries on a few corpus modules first (fast sanity) ---
for i in range(6):
    M = random_strict_module(i)
    ch = _single_factor_checks(M)
    assert all(ch.values()), (i, {k: v for k, v in ch.items() if not v})
for i in range(2):
    M = random_module(i, d=2, max_slice_dim=4)
    ch = _pair_checks(M)
    assert all(ch.values()), (i, {k: v for k, v in ch.items() if not v})
print("law batteries ok")

# --- hypercube command ---
code, out, err = run(["hypercube", "M⊗M", "--sign=+", "--format=dot"])
assert code == 0, err
assert out.count("label=") >= 9 and out.startswith("digraph")
code, out, err = run(["hypercube", "M", "--sign=-"])
assert code == 0
j = json.loads(out)
assert len(j["cells"]) == 3
dims = sorted(tuple(sorted(c.items())) for c in j["cells"].values())
# cells M (1,1), L(s) (0,1), L (1,0)
assert sorted(sum(v for _, v in c) for c in dims) == [1, 1, 2]

code, out, err = run(["hypercube", "M⊗"])
assert code == 1 and "position" in err, (code, err)
code, out, err = run(["hypercube", "M⊗M⊗M⊗M"])
assert code == 3, (code, err)

# --- ltensor ---
code, out, err = run(["ltensor", "3", "1", "--mode=ordinary"])
assert code == 0 and len(json.loads(out)["ordinary"]) == 6
code, out, err = run(["ltensor", "2", "1", "--mode=ordinary", "--format=tsv"])
assert code == 0 and set(out.strip().splitlines()) == {"1,0", "0,1"}
code, out, err = run(["ltensor", "2", "2", "--mode=mult"])
assert code == 0 and json.loads(out)["total_dim"] == 4
code, out, err = run(["ltensor", "3", "1", "--mode=isotypic", "--parabolic=1,1,1"])
assert code == 0 and len(json.loads(out)["components"]) == 7
code, out, err = run(["ltensor", "3", "1", "--mode=isotypic"])
assert code == 1  # needs --parabolic
code, out, err = run(["ltensor", "2", "1", "--mode=ordpart", "--format=tsv"])
assert code == 0 and out.strip() == "2", out

# --- refinements ---
code, out, err = run(["refinements", "3", "--c=1,2"])
assert code == 0 and json.loads(out) == [[1, 2, 3], [1, 3, 2], [2, 3, 1]]
code, out, err = run(["refinements", "3"])
assert code == 0 and len(json.loads(out)) == 6
code, out, err = run(["refinements", "4", "--c=" + ";".join(
    "%d,%d" % (i, j) for i in range(1, 5) for j in range(i + 1, 5))])
assert code == 0 and json.loads(out) == [[1, 2, 3, 4]]
code, out, err = run(["refinements", "3", "--c=1;2"])
assert code == 1

# --- fss ---
sk = make_skeleton(3, 1, extra=[[1, 2]])
with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
    fh.write(sk.to_json())
    path = fh.name
code, out, err = run(["fss", path])
assert code == 0 and len(json.loads(out)["nodes"]) == 5
code, out, err = run(["fss", path, "--format=dot"])
assert code == 0 and out.count("->") == 2
os.unlink(path)
code, out, err = run(["fss", "/nonexistent.json"])
assert code == 1  # click path check -> usage error

# bad skeleton file -> 1
with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
    fh.write("{\"n\": 2}")
    path = fh.name
code, out, err = run(["fss", path])
assert code == 1 and "lacks" in err
os.unlink(path)

# --- tables ---
code, out, err = run(["tables", "constituent_counts", "--d=2"])
assert code == 0 and out.strip() == "8 15", (code, out, err)
code, out, err = run(["tables", "constituent_counts", "--d=1"])
assert code == 0 and out.strip() == "3 4"
code, out, err = run(["tables", "surplus_bound", "--n=2", "--d=1"])
assert code == 0 and out.strip() == "1"
code, out, err = run(["tables", "surplus_bound", "--n=3", "--d=1"])
assert code == 0 and out.strip() == "2"
code, out, err = run(["tables", "hom_dim", "--part=1"])
assert code == 0 and out.strip() == "2"
code, out, err = run(["tables", "ext_dim", "--part=3", "--split"])
assert code == 0 and out.strip() == "4"
code, out, err = run(["tables", "ext_dim", "--part=3", "--family=corner",
                      "--critical"])
assert code == 0 and out.strip() == "4"
code, out, err = run(["tables", "hom_dim", "--part=1", "--verbose"])
assert code == 0 and json.loads(out)["statement"]
code, out, err = run(["tables", "e_mult", "--split"])
assert code == 0 and out.strip() == "3"
code, out, err = run(["tables", "e_mult", "--iset=0", "--split"])
assert code == 0 and out.strip() == "2"
code, out, err = run(["tables", "e_mult"])
assert code == 0 and out.strip() == "1"
code, out, err = run(["tables", "nonsense"])
assert code == 1
code, out, err = run(["tables", "hom_dim", "--part=3"])
assert code == 1 and "split" in err

# --- verify: quick suites ---
code, out, err = run(["verify", "cross-backend"])
assert code == 0, err
rep = json.loads(out)
assert rep["pass"] and len(rep["suites"]["cross-backend"]["cases"]) == 6
code, out2, err = run(["verify", "cross-backend"])
assert out == out2, "verify output not byte-identical"

code, out, err = run(["verify", "ordweight"])
assert code == 0 and json.loads(out)["pass"]

code, out, err = run(["verify", "appendixA", "--seed=1", "--size=5"])
assert code == 0, (err, out[-2000:])
assert json.loads(out)["pass"]

code, out, err = run(["verify", "functor-laws", "--size=3"])
assert code == 0, (err, out[-2000:])

code, out, err = run(["verify", "hypercube-edges", "--size=2"])
assert code == 0, (err, out[-2000:])

code, out, err = run(["verify", "bogus"])
assert code == 1

# --- help exits 0 ---
code, out, err = run(["--help"])
assert code == 0 and "hypercube" in out

print("cli smoke OK")
