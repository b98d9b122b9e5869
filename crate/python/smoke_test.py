"""Load the compiled extension and exercise each entry point once.

    cargo build --release -p ymh-py
    python3 python/smoke_test.py [path/to/libymh_py.so]
"""

import importlib.util
import math
import os
import shutil
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def find_library():
    if len(sys.argv) > 1:
        return sys.argv[1]
    for profile in ("release", "debug"):
        path = os.path.join(ROOT, "target", profile, "libymh_py.so")
        if os.path.exists(path):
            return path
    sys.exit("libymh_py.so not found; run `cargo build --release -p ymh-py` first")


def load(lib, tmp):
    # The module initialiser is PyInit_ymh, so the file must be named ymh.so.
    target = os.path.join(tmp, "ymh.so")
    shutil.copy(lib, target)
    spec = importlib.util.spec_from_file_location("ymh", target)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def main():
    with tempfile.TemporaryDirectory() as tmp:
        ymh = load(find_library(), tmp)

        e = ymh.bps_energy()
        assert abs(e / (8 * math.pi) - 1) < 0.01, e

        rad = ymh.radial_relax(epsilon=1.0, lambda_=1.0)
        assert rad["status"] == "Converged", rad["status"]
        assert rad["report"]["normalized"] > 8 * math.pi + 0.1

        f = ymh.Field.perturbed_trivial(8, 0.25, amplitude=0.05, seed=1)
        relaxed, trace = f.relax(step0=1e-3, max_iters=2000)
        assert trace["energy"][-1] <= trace["energy"][0]
        assert relaxed.energy()["total"] < f.energy()["total"]

        path = os.path.join(tmp, "f.ymh")
        relaxed.save(path)
        back = ymh.Field.load(path)
        assert back.energy() == relaxed.energy() and back.dims == [8, 8, 8]

        m = ymh.Field.monopole(0.25, n=33)
        deg = m.charge_degree([0.0, 0.0, 0.0], 1.0)
        assert abs(deg - 1) < 0.01, deg

        s = ymh.Field.sweepout([1.0, 0.0, 0.0], 0.25, n=9)
        assert s.energy()["total"] == 0.0

        try:
            ymh.Field.load(os.path.join(tmp, "missing.ymh"))
        except OSError:
            pass
        else:
            raise AssertionError("missing snapshot should raise OSError")
        try:
            ymh.bps_energy(epsilon=-1.0)
        except ValueError:
            pass
        else:
            raise AssertionError("negative epsilon should raise ValueError")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
