"""Smoke test for the pyresurgence extension module.

Build it first with `cargo build --release -p resurgence-py`; the script
loads target/release/libpyresurgence.so (or the debug build) when the
module is not already importable.
"""

import importlib.util
import pathlib
import sys
from decimal import Decimal, getcontext
from fractions import Fraction

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import pyresurgence

        return pyresurgence
    except ImportError:
        pass
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libpyresurgence.so"
        if lib.exists():
            spec = importlib.util.spec_from_file_location("pyresurgence", lib)
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            return module
    sys.exit("pyresurgence not built: run `cargo build --release -p resurgence-py`")


def main():
    rs = load()

    v = rs.g(-1, digits=50)
    assert v.re.startswith("-3.801048126096840167775421565518"), v
    assert abs(complex(v) - (-0.3801048126096840)) < 1e-15
    assert rs.g("0.5+2i", crosscheck=True).method

    try:
        rs.g(3)
    except rs.BranchCutError:
        pass
    else:
        raise AssertionError("z = 3 must raise BranchCutError")
    assert issubclass(rs.BranchCutError, rs.DomainError)

    table = rs.PolyTable.shipped(3)
    assert [Fraction(c) for c in table.poly(1)] == [Fraction(47, 2160), Fraction(7, 24), -1, Fraction(2, 3)]
    text = table.to_text()
    assert rs.PolyTable.from_text(text).to_text() == text
    assert all(p <= b for _, _, p, b in table.smoothness())

    assert rs.deltas(1)[1] == ["-1/24", "0/1", "2/1"]
    assert rs.shipped_constants()[:2] == ["-2/3", "47/2160"]

    x, s, kept = rs.s_of_u(100)
    assert x == "0" and kept >= 30
    assert abs(float(s) + 0.66645085245603519) < 1e-15

    assert rs.fit(k_max=4) == rs.shipped_constants()[:5]

    c, r, stable = rs.extract_cr(110, 150, digits=40)
    getcontext().prec = 60
    assert abs(Decimal(c) - Decimal(rs.C_REFERENCE)) < Decimal("1e-28")
    assert abs(Decimal(r) - Decimal(rs.R_REFERENCE)) < Decimal("1e-28")
    assert stable >= 25

    ok, line = rs.run_criterion(3)
    assert ok, line
    print("python smoke test: ok")


if __name__ == "__main__":
    main()
