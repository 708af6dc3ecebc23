"""Time the numba and numpy kernels on the same workloads.

    python benchmarks/bench_kernels.py [--quick]

Each row runs both backends on identical input and checks that the counts
agree before reporting timings.  The first numba call per signature pays
JIT compilation (cached on disk afterwards); a warm-up run excludes it.
"""

import argparse
import time

from brpic import kernels
from brpic._accel import numba_installed
from brpic.extraspecial import ExtraSpecialSpec, omega_class, stab_d_generators
from brpic.lie import killing_form, omega_from_metric, sl2
from brpic.stab import sweep_test


def _time(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def sweep_cases(quick):
    cases = [
        ("Stab(omega_D), GL3(F3)", omega_class(ExtraSpecialSpec(3, 1, "D"))),
        ("Stab(omega^sl2), GL3(F5)", omega_from_metric(sl2(5), killing_form(sl2(5)))),
    ]
    if not quick:
        cases.append(("Stab(omega_D), GL5(F2)", omega_class(ExtraSpecialSpec(2, 2, "D"))))
    return cases


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true", help="skip the GL5(F2) sweep and the large closure")
    args = ap.parse_args()
    if not numba_installed:
        raise SystemExit("numba is not installed; nothing to compare")

    print(f"{'workload':34} {'numba s':>9} {'numpy s':>9} {'speedup':>8}  result")
    for label, omega in sweep_cases(args.quick):
        test = sweep_test(omega)
        kernels.sweep(sweep_test(omega_class(ExtraSpecialSpec(2, 1, "D"))), backend="numba")  # warm-up
        (c1, _), t1 = _time(lambda: kernels.sweep(test, backend="numba"))
        (c2, _), t2 = _time(lambda: kernels.sweep(test, backend="numpy"))
        assert c1 == c2, (label, c1, c2)
        print(f"{label:34} {t1:9.3f} {t2:9.3f} {t2 / t1:8.1f}x  {c1:,}")

    spec = ExtraSpecialSpec(3, 1 if args.quick else 2, "D")
    gens = [g.to_array() for g in stab_d_generators(spec)] if spec.n > 1 else None
    if gens is None:
        from brpic.stab import symplectic_generators
        gens = [g.to_array() for g in symplectic_generators(3, 2)]
        n, label = 4, "closure Sp4(F3)"
    else:
        n, label = 5, "closure AffGSp4(F3)"
    kernels.closure_keys(gens[:1], 3, n, backend="numba")  # warm-up
    k1, t1 = _time(lambda: kernels.closure_keys(gens, 3, n, max_bytes=4e8, backend="numba"))
    k2, t2 = _time(lambda: kernels.closure_keys(gens, 3, n, max_bytes=4e9, backend="numpy"))
    assert len(k1) == len(k2)
    print(f"{label:34} {t1:9.3f} {t2:9.3f} {t2 / t1:8.1f}x  {len(k1):,}")


if __name__ == "__main__":
    main()
