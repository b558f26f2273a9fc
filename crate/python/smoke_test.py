"""Smoke test for the pyalgrowth extension.

Build and install with `pip install --no-build-isolation -e crates/py`, then
run `python python/smoke_test.py` from the repository root.
"""

import math
import pathlib

import pyalgrowth

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"


def read(name):
    return (DATA / name).read_text()


def main():
    dims, (verdict, rate) = pyalgrowth.growth(read("free2.json"), read("xy_sigma.json"), 12, (4, 12))
    assert dims == [2 ** (n + 1) - 2 for n in range(1, 13)], dims
    assert verdict == "exponential" and abs(rate - math.log(2)) < 0.05, (verdict, rate)

    dims, verdict = pyalgrowth.growth(read("commutative2.json"), read("xy_sigma.json"), 6)
    assert dims == [(n + 1) * (n + 2) // 2 - 1 for n in range(1, 7)] and verdict is None

    assert pyalgrowth.surface_ball(2, 3) == [1, 9, 65, 457]
    assert pyalgrowth.free_ball(2, 3) == [1, 5, 17, 53]
    assert pyalgrowth.hilbert([1, 1], 4) == [1, 2, 4, 8, 16]
    assert pyalgrowth.witt([1, 1], 2) == [2, 3]
    assert pyalgrowth.pbw([1, 2, 3], 12) is None

    rows = "".join(f"{n}\t{n ** 3}\n" for n in range(1, 31))
    affine, entropy = pyalgrowth.bounds("x\ti\n" + rows, ambient_dim=6)
    assert "consistent with affine" in affine, affine
    assert "entropy" in entropy

    for call, error in [
        (lambda: pyalgrowth.growth(read("bad_relation.json"), read("xy_sigma.json"), 3), ValueError),
        (lambda: pyalgrowth.growth("{", "[]", 3), ValueError),
        (lambda: pyalgrowth.surface_ball(1, 3), NotImplementedError),
        (lambda: pyalgrowth.bounds("x\ti\n1\t2\n", max_f="1/2"), ValueError),
    ]:
        try:
            call()
        except error:
            pass
        else:
            raise AssertionError(f"expected {error.__name__}")

    code, out, _ = pyalgrowth.run(["verify", "retract", "--seed", "0", "--count", "3"])
    assert code == 0 and "passed=3" in out, out
    code, _, err = pyalgrowth.run(["loop", "ball", "--surface-genus", "2", "--non-orientable", "--n", "2"])
    assert code == 4, err
    print("pyalgrowth smoke test passed")


if __name__ == "__main__":
    main()
