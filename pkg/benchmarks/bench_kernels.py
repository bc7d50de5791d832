"""Time the per-step kernels and a full run under each available backend.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

from occpf import kernels
from occpf.dynamics import DynamicsParams
from occpf.model import VehicleBody, corners
from occpf.scenario import bundled_scenario_path, load_scenario
from occpf.sim import run_simulation


def _cases():
    body = VehicleBody(4.8, 1.8)
    p = DynamicsParams()
    phys = (p.mass, p.inertia_z, p.dist_front, p.dist_rear, p.cornering_front, p.cornering_rear, p.v_floor)
    sources = [(120.0, 6.0, 100.0, 1.2, 1.2, 0.3), (160.0, 2.0, 90.0, 1.0, 1.0, 1.0)]
    force_args = (40.0, 9.7, 8.7e8, 1e-8, 0.0, 12.0, 0.9, 0.18, 7.0, (4.0, 8.0), 0.08, 1.2,
                  sources, 0.07, False)
    occ = [c for q in corners(80.0, 6.0, 0.0, body) for c in q]
    tgt = [c for q in corners(115.0, 2.0, 0.0, body) for c in q]
    step_args = (0.0, 10.0, 0.01, 0.001, 0.02, 30.0, 0.01, -0.2, 0.01) + phys
    return {
        "net_force": lambda: kernels.net_force(*force_args),
        "bicycle_step": lambda: kernels.bicycle_step(*step_args),
        "hidden_by": lambda: kernels.hidden_by(0.0, 10.0, occ, tgt),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--calls", type=int, default=20000)
    args = ap.parse_args()

    scenario = load_scenario(bundled_scenario_path("paper_fig3")).calibrated()
    cases = _cases()
    results = {}
    for name in kernels.available_backends():
        kernels.set_backend(name)
        row = {}
        for case, fn in cases.items():
            best = min(timeit.repeat(fn, number=args.calls, repeat=args.repeat))
            row[case] = best / args.calls * 1e6  # microseconds per call
        row["run pf-oapp"] = min(timeit.repeat(lambda: run_simulation(scenario, "pf-oapp"),
                                               number=1, repeat=args.repeat)) * 1e3  # ms
        results[name] = row

    names = list(results)
    print(f"{'kernel':<16}" + "".join(f"{n:>12}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for case in results[names[0]]:
        unit = "ms" if case.startswith("run") else "us"
        vals = [results[n][case] for n in names]
        line = f"{case + ' [' + unit + ']':<16}" + "".join(f"{v:12.3f}" for v in vals)
        if len(vals) > 1:
            line += f"{vals[0] / vals[1]:11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
