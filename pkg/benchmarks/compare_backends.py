"""Time the compiled kernels against the pure Python fallback.

Each backend runs in its own process (the choice is made at import time
through ``LEAFSELECT_NO_JIT``).  Both must report the same selections and
step counts; only the wall times differ.

    python3 benchmarks/compare_backends.py --sizes 256,1024,4096 --repeat 3
"""
import argparse
import json
import os
import subprocess
import sys
import textwrap

WORKER = textwrap.dedent("""
    import json, sys, time
    from leafselect import GenConfig, backend, generate, select_leaves
    sizes, repeat = json.loads(sys.argv[1]), int(sys.argv[2])
    # warm-up so compilation is not timed
    select_leaves(generate(GenConfig(64, 20, seed=0, nh_growth=3)), "1/2")
    rows = []
    for n in sizes:
        mt = generate(GenConfig(n, 3 * n // 10, seed=1, nh_growth=3))
        best = None
        for _ in range(repeat):
            t0 = time.perf_counter()
            sel = select_leaves(mt, "1/2", validate=False)
            dt = time.perf_counter() - t0
            best = dt if best is None else min(best, dt)
        rows.append({"n": n, "seconds": best, "steps": sel.total_steps,
                     "selected": list(sel.leaves)})
    print(json.dumps({"backend": backend(), "rows": rows}))
""")


def run(sizes, repeat, no_jit):
    env = dict(os.environ)
    env.pop("LEAFSELECT_NO_JIT", None)
    if no_jit:
        env["LEAFSELECT_NO_JIT"] = "1"
    proc = subprocess.run([sys.executable, "-c", WORKER, json.dumps(sizes), str(repeat)],
                          capture_output=True, text=True, env=env, check=True)
    return json.loads(proc.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="256,1024,4096,16384")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    fast = run(sizes, args.repeat, no_jit=False)
    slow = run(sizes, args.repeat, no_jit=True)
    print(f"{'n':>8} {fast['backend']:>12} {slow['backend']:>12} {'speed-up':>9}  same")
    for a, b in zip(fast["rows"], slow["rows"]):
        same = a["steps"] == b["steps"] and a["selected"] == b["selected"]
        print(f"{a['n']:>8} {a['seconds'] * 1e3:>10.2f}ms {b['seconds'] * 1e3:>10.2f}ms "
              f"{b['seconds'] / a['seconds']:>8.1f}x  {same}")
        if not same:
            sys.exit("backends disagree")


if __name__ == "__main__":
    main()
