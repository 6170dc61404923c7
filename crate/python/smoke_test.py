"""Smoke test for the tenscomb Python bindings.

Build first with `cargo build --offline -p tenscomb-py` (or `--release`).
If `tenscomb_py` is already importable (for example after a maturin
install) that copy is used instead.
"""

import importlib.util
import json
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load():
    try:
        import tenscomb_py

        return tenscomb_py
    except ImportError:
        pass
    suffix = {"darwin": "dylib", "win32": "dll"}.get(sys.platform, "so")
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / f"libtenscomb_py.{suffix}"
        if lib.exists():
            tmp = Path(tempfile.mkdtemp()) / "tenscomb_py.so"
            shutil.copy(lib, tmp)
            spec = importlib.util.spec_from_file_location("tenscomb_py", tmp)
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            return module
    sys.exit("tenscomb_py not built; run `cargo build -p tenscomb-py` first")


def main():
    tc = load()

    assert tc.fuss_catalan(3, 4) == "140/1"
    assert tc.melonic_series(1, 5) == ["1/1", "1/1", "2/1", "5/1", "14/1", "42/1"]

    melon = {
        "d": 3,
        "vertices": [{"id": 0, "parity": "w"}, {"id": 1, "parity": "b"}],
        "edges": [{"w": 0, "b": 1, "c": c} for c in range(4)],
    }
    assert tc.degree(json.dumps(melon)) == 0
    assert tc.exponent(json.dumps(melon)) == 3

    report = json.loads(tc.knot("[[1,5,2,4],[3,1,4,6],[5,3,6,2]]"))
    assert report["vertices"] == 24
    assert [b["genus"] for b in report["nonplanar_bubbles"]] == [1]

    out, _, code = tc.run(["series", "--d", "3", "--order", "3"])
    assert code == 0
    assert json.loads(out)["result"]["coefficients"] == ["1/1", "1/1", "4/1", "22/1"]

    try:
        tc.run(["series", "--bogus"])
    except ValueError:
        pass
    else:
        raise AssertionError("usage error did not raise")

    results = tc.verify("1,2", 42)
    assert [(i, ok) for i, _, ok in results] == [(1, True), (2, True)]

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
