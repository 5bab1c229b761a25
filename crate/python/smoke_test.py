"""Smoke test for the pyergolab extension.

Build the extension first with `cargo build --release -p ergolab-py`; this
script copies the resulting shared library next to itself as `pyergolab.so`
unless one is already importable.
"""

import cmath
import glob
import os
import shutil
import sys

HERE = os.path.dirname(os.path.abspath(__file__))
ROOT = os.path.dirname(HERE)


def locate_extension():
    target = os.path.join(HERE, "pyergolab.so")
    for profile in ("release", "debug"):
        for lib in glob.glob(os.path.join(ROOT, "target", profile, "libpyergolab.*")):
            if lib.endswith((".so", ".dylib")):
                shutil.copyfile(lib, target)
                return
    if not os.path.exists(target):
        sys.exit("build the extension with `cargo build --release -p ergolab-py` first")


locate_extension()
sys.path.insert(0, HERE)

import pyergolab as el  # noqa: E402


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


# Cantor measure: vanishing at 2 and at 4^k * 2, conjugate symmetry.
assert abs(el.cantor_fourier(2)) < 1e-12
assert abs(el.cantor_fourier(8)) < 1e-12
assert close(el.cantor_fourier(-3), el.cantor_fourier(3).conjugate())
assert close(el.cantor_fourier(1), el.cantor_fourier(4))

assert el.chacon_heights(4) == [1, 4, 13, 40]
assert el.rudin_shapiro_sequence(8) == [1, 1, 1, -1, 1, 1, -1, 1]
assert close(el.iet_apply([0.5, 0.5], [1, 0], 0.25), 0.75)

# Skew torus over the Cantor base: exact limit along powers of 4.
torus = el.System.skew_torus("cantor4")
f = el.Observable.character([0, 1])
g = el.Observable.character([1, 1])
lags = [4 ** k for k in range(1, 16)]
c = el.correlation(torus, f, lags, g=g, exact=True)
target = el.cantor_fourier(1) * el.cantor_fourier(-1)
report = c.limit({"kind": "subsequence", "indices": lags}, 1e-8)
assert report["converged"]
limit = complex(*report["value"])
assert abs(limit - target) < 1e-8, (limit, target)

# Rotation: exact characters, spectral atom at alpha.
alpha = (5 ** 0.5 - 1) / 2
rot = el.System.rotation(alpha)
e1 = el.Observable.character([1])
c = el.correlation(rot, e1, list(range(-256, 257)), exact=True)
assert close(c[1], cmath.exp(2j * cmath.pi * alpha))
assert abs(c.atom_mass(256) - 1.0) < 1e-12

# Rigidity of the golden rotation along its convergent denominators.
profile = el.rigidity_search(rot, el.Observable.interval(0.0, 0.5), max_lag=100_000, orbit_length=200_000)
assert profile["kind"]["kind"] == "rigid", profile["kind"]

# Mixing verdicts of an i.i.d. shift.
shift = el.System.bernoulli([0.5, 0.5], seed=3)
verdict = el.classify(shift, [el.Observable.cylinder("0").centered()], max_lag=2000, orbit_length=200_000)
assert verdict["strong_proxy"] == "pass", verdict

# Finite joinings.
assert el.is_disjoint(el.FiniteSystem.cyclic(2), el.FiniteSystem.cyclic(3))
assert not el.is_disjoint(el.FiniteSystem.cyclic(2), el.FiniteSystem.cyclic(4))
poly = el.joining_polytope(el.FiniteSystem.cyclic(2), el.FiniteSystem.cyclic(2))
assert poly["dimension"] == 1
vertices, partial = el.extreme_joinings(el.FiniteSystem.cyclic(2), el.FiniteSystem.cyclic(2))
assert len(vertices) == 2 and not partial

# Operators.
p_im, p_ker = el.image_kernel_decomposition([[1, 0], [0, 0]])
assert close(p_im[0][0], 1) and close(p_ker[1][1], 1)
assert el.check_normal([[0, 1], [1, 0]])
assert not el.check_normal([[0, 1], [0, 0]])

# Scenarios.
names = el.list_builtin_scenarios()
assert "cantor-example-4.4" in names
summary = el.run_scenario("cantor-example-4.4")
assert summary["passed"], summary

print("pyergolab smoke test passed")
