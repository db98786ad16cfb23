"""Smoke test for the propwing extension module.

Run from the repository root after `maturin develop` (or with the built
shared library on PYTHONPATH).
"""

import math
import os
import sys
import tempfile

import propwing

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def data(name):
    return os.path.join(ROOT, "data", name)


def main():
    polar = propwing.Polar.load(data("e423_re300k.csv"), 3e5, window=(-2.5, 10.0))
    a0, alpha0 = polar.fit(-2.5, 10.0)
    assert 4.0 < a0 < 7.0, a0
    assert polar.cl(alpha0) == 0.0 or abs(polar.cl(alpha0)) < 1e-9
    assert polar.cd(0.8) > 0.0

    wing = propwing.control_wing(1.6, 0.479, 0.35, 0.2487, washout_deg=-2.0)
    assert abs(wing.area - 0.479) < 1e-3
    assert abs(wing.twist_deg(1.0) + 2.0) < 1e-12
    again = propwing.Planform.from_csv(wing.to_csv())
    assert again.chord_controls == wing.chord_controls

    slip = propwing.Slipstream.load(data("avion_slipstream.csv"))
    u, _ = slip.sample(0.24)
    assert u > 0.0

    off = propwing.solve(wing, polar, 15.0, 1.112, 0.0, 2.94e5)
    on = propwing.solve(wing, polar, 15.0, 1.112, 0.0, 2.94e5, slipstream=slip)
    assert on["cl"] > off["cl"] > 0.0
    assert abs(on["cd"] - on["cdi"] - on["cf"]) < 1e-15

    opt, info = propwing.optimize(wing, polar, 15.0, 1.112, 0.0, 2.94e5, off["cl"], cost="induced_drag")
    assert info["converged"], info
    assert abs(opt.area - wing.area) < 1e-6
    assert info["cdi"] <= off["cdi"] + 1e-9

    j = propwing.advance_ratio(3.8, 5000.0, 0.2286)
    assert abs(j - 0.1995) < 5e-4
    assert abs(propwing.thrust_coefficient(1.0, 6000.0, 1.0, 1.0) - 1e-4) < 1e-16
    sweep = propwing.ct_sweep(data("da4002_like.csv"), data("prop_section_re100k.csv"), 5000.0, [4.0, 8.0, 12.0])
    cts = [ct for _, ct in sweep]
    assert cts[0] > cts[1] > cts[2] > 0.0

    with tempfile.TemporaryDirectory() as out:
        report = propwing.run_case(os.path.join(ROOT, "cases", "w1.cfg"), out)
        assert report["converged"]
        assert math.isclose(report["opt_CL"], 0.7, abs_tol=1e-6)
        assert os.path.isfile(os.path.join(out, "report.txt"))

    try:
        propwing.Polar.load(data("missing.csv"), 3e5)
    except OSError:
        pass
    else:
        raise AssertionError("missing polar accepted")

    print("smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
