"""Smoke test for the timeavg Python bindings.

Uses an installed ``timeavg`` module if there is one (``maturin develop`` in
crates/python); otherwise loads the cdylib from target/release or target/debug.
"""

import cmath
import importlib.util
import math
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import timeavg

        return timeavg
    except ImportError:
        pass
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libtimeavg_py.so"
        if lib.exists():
            # the import system wants the module name as the file stem
            tmp = pathlib.Path(tempfile.mkdtemp()) / "timeavg.so"
            shutil.copy(lib, tmp)
            spec = importlib.util.spec_from_file_location("timeavg", tmp)
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            return module
    sys.exit("timeavg extension not found; run `cargo build -p timeavg-python --release` first")


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    ta = load()

    b = ta.Basis.dirichlet(1.0, 16)
    assert b.kind == "dirichlet_interval" and b.mode_count == 16
    assert close(b.lambdas[0], math.pi**2, 1e-15)

    # ζ for λ = 0, r = 1, T = 1 is e − 1
    assert close(ta.zeta_factor(1.0, 1.0, 0.0), math.e - 1.0, 1e-15)

    xi = [cmath.exp(1j * k) / (k + 1) ** 2 for k in range(16)]
    mu = ta.apply_time_average(b, xi, 1.0, 1.0)
    back = ta.recover_initial(b, mu, 1.0, 1.0)
    err = math.sqrt(sum(abs(x - y) ** 2 for x, y in zip(back, xi)))
    assert err <= 1e-12 * math.sqrt(sum(abs(x) ** 2 for x in xi)), err

    traj = ta.reconstruct_solution(b, mu, 1.0, 1.0, [0.0, 0.5, 1.0])
    assert len(traj) == 3 and all(close(x, y, 1e-12) for x, y in zip(traj[0], back))

    assert close(ta.stability_bound(1.0, 1.0), 2.0 / (math.e - 1.0), 1e-15)

    try:
        ta.recover_initial(b, mu, 0.0, 2.0 / math.pi)
    except ta.DegenerateModeError as e:
        assert list(e.args[1]) == list(range(1, 17))
    else:
        raise AssertionError("expected DegenerateModeError")

    try:
        ta.recover_initial(b, mu, 1j, 1.0)
    except ta.IllPosedError:
        pass
    else:
        raise AssertionError("expected IllPosedError")

    rep = ta.conditioning_report(b, 0.0, 2.0 / math.pi)
    assert rep["well_posed"] is False and rep["min_abs_zeta"] == 0.0

    shift = ta.shift_problem(ta.Basis.custom(1.0, [-2.0, 0.5, 3.0]), 1.0, 1.0)
    assert shift["q"] == 3.0 and shift["r_bar"] == 1.0 + 3.0j

    # grid round trip and the finite-difference oracle
    samples = b.synthesize(xi[:4] + [0] * 12, 257)
    proj = b.project(samples)
    assert all(close(p, x, 1e-10) for p, x in zip(proj[:4], xi[:4]))
    low = ta.Basis.dirichlet(1.0, 2)
    spectral = ta.apply_time_average(low, [1.0, 0.5j], 1.0, 1.0)
    oracle = ta.oracle_mu_coeffs(low, [1.0, 0.5j], 1.0, 1.0, 255, 1e-3)
    assert all(abs(o - s) <= 5e-2 * abs(s) for o, s in zip(oracle, spectral))

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
