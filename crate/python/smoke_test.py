"""Build the extension and exercise it from Python.

    python3 python/smoke_test.py
"""

import importlib.machinery
import importlib.util
import pathlib
import subprocess
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    subprocess.run(
        ["cargo", "build", "-p", "pgx-py", "--release", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    so = ROOT / "target" / "release" / "libpgx.so"
    loader = importlib.machinery.ExtensionFileLoader("pgx", str(so))
    spec = importlib.util.spec_from_file_location("pgx", so, loader=loader)
    module = importlib.util.module_from_spec(spec)
    loader.exec_module(module)
    return module


def main():
    pgx = load()
    assert pgx.SCHEMA == 1
    assert pgx.residue_params(5) == (2, 2)
    assert pgx.residue_params(7) == (3, 3)
    assert len(pgx.catalog_names(4, 5)) == 10
    assert len(pgx.catalog_names(5, 7)) == 76
    assert pgx.gamma([4]) == [8]
    assert pgx.gamma([3, 3]) == [3, 3, 3]
    assert pgx.abelian_tensor([4], [6]) == [2]

    info = pgx.analyze("Phi8(32)", 5)
    assert info["multiplier"] == []
    assert info["exterior_square"] == "Z(p^2)"
    assert info["exterior_square_order"] == 25
    assert info["tensor_square_order"] == 25**2 * 5**2
    assert info["capable"] is False

    heis = "generators: a, b, c\n[b,a] = c\na^p = 1\nb^p = 1\nc^p = 1\n"
    info = pgx.analyze(heis, 7)
    assert info["multiplier"] == [7, 7]
    assert info["capable"] is True

    assert pgx.be_multiplier("Phi4(221)d_2", 5) == [25]
    assert pgx.be_multiplier("Phi4(221)b", 5) == [5, 5]
    try:
        pgx.be_multiplier("Phi2(41)", 5)
    except ValueError as e:
        assert "G/G'" in str(e)
    else:
        raise AssertionError("expected ValueError")
    try:
        pgx.analyze("Phi2(1^5)", 5, timeout=1e-6)
    except TimeoutError:
        pass
    else:
        raise AssertionError("expected TimeoutError")

    assert pgx.verify("theorem-p3p4", [5]) == (12, 0, 0)
    print("python smoke test: ok")


if __name__ == "__main__":
    sys.exit(main())
