"""The command-line front end, driven in-process.

The same calls work from a shell as `invgauss <subcommand> ...` once the
package is installed.
"""
import json
import os
import tempfile

from invgauss.cli import main

with tempfile.TemporaryDirectory() as tmp:
    fn = os.path.join(tmp, "f.json")
    pts = os.path.join(tmp, "pts.json")
    with open(fn, "w") as fh:
        json.dump({"dim": 1, "terms": [{"exponents": [1], "coeff_re": 2.0}]}, fh)
    with open(pts, "w") as fh:
        json.dump([[-1.0], [0.0], [0.5]], fh)

    print("$ invgauss apply riesz:1 --function f.json --points pts.json")
    print("exit", main(["apply", "riesz:1", "--function", fn, "--points", pts]))

    print("\n$ invgauss pv-sweep imaginary:1 --function f.json --point 0.3 --depth 4")
    print("exit", main(["pv-sweep", "imaginary:1", "--function", fn, "--point", "0.3", "--depth", "4"]))

    out = os.path.join(tmp, "k.csv")
    print("\n$ invgauss kernel Mbeta --grid=-3,3,21 --out k.csv")
    print("exit", main(["kernel", "Mbeta", "--grid=-3,3,21", "--out", out]))
    with open(out) as fh:
        lines = fh.read().splitlines()
    print(len(lines) - 1, "rows;", lines[:3])

    print("\n$ invgauss certify acotdif --dim 1 --alpha 1")
    print("exit", main(["certify", "acotdif", "--dim", "1", "--alpha", "1"]))

    print("\n$ invgauss show-config --dim 2")
    main(["show-config", "--dim", "2"])
