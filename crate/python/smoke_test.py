"""Builds the extension module and exercises it from Python.

Usage: python3 python/smoke_test.py [--no-build]
"""

import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build():
    subprocess.run(
        ["cargo", "build", "--release", "-p", "standpoint-python", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )


def load(target):
    lib = ROOT / "target" / "release" / "libstandpoint_py.so"
    shutil.copy(lib, Path(target) / "standpoint_py.so")
    sys.path.insert(0, str(target))
    import standpoint_py

    return standpoint_py


def main():
    if "--no-build" not in sys.argv:
        build()
    with tempfile.TemporaryDirectory() as tmp:
        sp = load(tmp)

        phi = sp.parse("[s] p & <s> ~q")
        assert str(phi) == "[s] p & <s> ~q", str(phi)
        assert phi.modal_depth() == 1
        model = sp.sat(phi)
        assert model is not None and model.holds(phi)
        assert all(model.check(phi))

        assert sp.sat(sp.parse("p & ~p")) is None
        assert sp.sat(sp.parse("p & <*> ~p")) is None
        assert sp.sat(sp.parse("p & <*> ~p"), mode="local") is not None

        assert sp.valid(sp.parse("[*] p -> p")) == (True, None)
        ok, counter = sp.valid(sp.parse("[s] p -> <s> p"))
        assert not ok and counter.sigma["s"] == set()
        assert sp.valid(sp.parse("[s] p -> <s> p"), nonempty=True)[0]

        witness = sp.oracle(sp.parse("<s> p & <s> ~p"))
        assert witness is not None and len(sp.prune(witness, sp.parse("<s> p & <s> ~p"))) == 2

        m = sp.Structure.from_json(
            '{"precisifications": ["pi1", "pi2"], "sigma": {"s": ["pi1"], "t": ["pi1", "pi2"]}, "delta": {}}'
        )
        assert m.check(sp.parse("(s <= t)")) == [True, True]

        assert sp.translate(sp.parse("p"), 1) == "p@pi1 & *@pi1"
        assert sp.translate(sp.parse("p"), 1, "dimacs").rstrip().endswith("0")

        assert sp.fo_sentential("! x . <*> ~(? y . Btt(y, x))") == (False, ["x"])
        assert sp.fo_sentential("[LC] (! x . (Forest(x) -> Eco(x)))") == (True, [])
        assert sp.fo_translate("P(a)", 1, "tptp") == "fof(f0, axiom, p__pi1(a) & star__pi1)."

        code, out, _ = sp.run(["sat", "p & ~p"])
        assert (code, out) == (20, "UNSAT\n")
    print("python smoke test passed")


if __name__ == "__main__":
    main()
