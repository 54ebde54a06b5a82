"""Smoke test of the softedge Python bindings.

Run after `maturin develop --release` (or `pip install --no-build-isolation .`)
from crates/py.
"""

import math

import softedge_py as se


def main():
    gue = se.Ensemble("gaussian", 2, 64)
    sc = gue.scaling()
    assert abs(sc["mu"] - 8 * math.sqrt(2)) < 1e-12 and abs(sc["h"] - 1 / 64) < 1e-15

    # n = 1 closed form: E(x; xi) = 1 - xi erfc(x) / 2.
    one = se.Ensemble("gaussian", 2, 1)
    s1 = one.scaling()
    x = s1["mu"] + s1["sigma"] * 0.3
    e = se.finite_generating(one, 0.3, 0.5)
    assert abs(e - (1 - 0.5 * math.erfc(x) / 2)) < 1e-12

    f2 = se.limit_cdf(2, -2.0)
    assert abs(f2 - 0.41322414250512257) < 1e-9, f2

    value, exact = se.total_integral(0.5)
    assert abs(value - exact) < 1e-6

    assert se.coefficient(2, 1, 2) == "1/10*tau - 3/10"
    assert se.coefficient(1, 1, 2) == se.coefficient(4, 1, 2)

    goe = se.Ensemble("gaussian", 1, 10)
    sums = se.expand(goe, [-1.0, 0.0], 2, k=3)
    assert len(sums) == 2 and all(len(r) == 3 for r in sums)

    spectra = se.sample(se.Ensemble("laguerre", 4, 3, p=8.0), 5, 7)
    assert len(spectra) == 5 and all(a <= b for a, b in zip(spectra[0], spectra[0][1:]))

    try:
        se.Ensemble("laguerre", 2, 5)
    except se.SoftedgeError:
        pass
    else:
        raise AssertionError("missing p accepted")

    report = se.run_criterion(7)
    assert report["passed"], report
    print("smoke test passed")


if __name__ == "__main__":
    main()
