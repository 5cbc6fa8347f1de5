"""Acceptance criteria, one test each, with a PASS/FAIL line per criterion.

Run alone with ``pytest tests/test_acceptance.py -s -m acceptance``.
"""
import csv
import io
import subprocess
import sys
import time

import numpy as np
import pytest

from support import ADVERSARIAL, P_VALUES, random_pigeonhole, run_soak, soak_configs
from leafselect import GenConfig, generate, select_leaves
from leafselect.cli import main as cli_main
from leafselect.oracle import (PigeonholeInstance, check_pigeonhole, check_size_bounds_report,
                               existence_floor, oracle_report, tight_pigeonhole)
from leafselect.selector import build_pipeline
from leafselect.tree import ComponentKind, DegenerateTreeError, NodeLabel, analyze

pytestmark = pytest.mark.acceptance


def report(capsys, number, title, ok, detail):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}")


@pytest.fixture(scope="module")
def soak():
    t0 = time.perf_counter()
    res = run_soak(soak_configs())
    return res, time.perf_counter() - t0


# ---------------------------------------------------------------------------
# 1, 2, 4: the 10,000-instance soak
# ---------------------------------------------------------------------------

def test_criterion_1_yield(soak, capsys):
    res, seconds = soak
    ok = (res.instances == 10_000 and not res.invalid and not res.yield_failures
          and res.runs == 3 * res.instances and min(res.sizes) == 16
          and max(res.sizes) == 65_536 and seconds < 120)
    report(capsys, 1, "yield 10|S| >= p m", ok,
           f"{res.instances} instances, {res.runs} runs, {len(res.invalid)} invalid, "
           f"{len(res.yield_failures)} yield failures, soak {seconds:.1f}s")
    assert res.instances == 10_000
    assert not res.invalid
    assert not res.yield_failures, res.yield_failures[:5]
    assert seconds < 120


def test_criterion_2_output_validity(soak, capsys):
    res, _ = soak
    ok = not res.verify_failures and res.runs == 3 * res.instances
    report(capsys, 2, "selected neighbourhoods disjoint and bridge-free", ok,
           f"{res.runs} selections verified, {len(res.verify_failures)} failures; outcomes "
           f"{res.outcomes}")
    assert not res.verify_failures, res.verify_failures[:5]
    # every traversal outcome occurs somewhere in the soak
    assert all(v > 0 for v in res.outcomes.values())


def test_criterion_4_counting(soak, capsys):
    res, _ = soak
    ok = not res.counting_failures and res.counting_checked > 0
    report(capsys, 4, "8 #L >= #ungrouped", ok,
           f"{res.counting_checked} labelled instances, {len(res.counting_failures)} failures, "
           f"components {res.kinds}")
    assert ok, res.counting_failures[:5]


# ---------------------------------------------------------------------------
# 3: existence floor against the exact optimum
# ---------------------------------------------------------------------------

def small_family(count, seed):
    rng = np.random.default_rng(seed)
    shapes = ("random", "caterpillar", "balanced", "longspine")
    cfgs = []
    for i in range(count):
        m = int(rng.integers(1, 21))
        n = m + int(rng.integers(0, 60))
        n = max(n, 2)
        clustered = i % 3 == 2
        cfgs.append(GenConfig(n, m, seed=i, shape=shapes[i % 4],
                              marking="clustered" if clustered else "uniform",
                              burst=int(rng.integers(1, m + 1)) if clustered else 1,
                              nh_growth=int(rng.choice([1, 2, 3, 5, 8]))))
    return cfgs


def test_criterion_3_existence_floor(capsys):
    t0 = time.perf_counter()
    bad_floor, bad_dom, tight = [], [], 0
    for cfg in small_family(1000, 3):
        mt = generate(cfg)
        rep = oracle_report(mt)
        if rep.optimum < existence_floor(mt.m):
            bad_floor.append(cfg)
        if rep.optimum == existence_floor(mt.m):
            tight += 1
        for p in P_VALUES:
            if len(select_leaves(mt, p, validate=False).leaves) > rep.optimum:
                bad_dom.append((cfg, p))
    seconds = time.perf_counter() - t0
    ok = not bad_floor and not bad_dom and seconds < 60
    report(capsys, 3, "optimum >= ceil(m/10) and algorithm <= optimum", ok,
           f"1000 instances (m <= 20), {len(bad_floor)} floor failures, {len(bad_dom)} "
           f"dominance failures, {tight} at the floor, {seconds:.1f}s")
    assert not bad_floor and not bad_dom
    assert seconds < 60


# ---------------------------------------------------------------------------
# 5: confined neighbourhood sizes
# ---------------------------------------------------------------------------

def size_family(count):
    shapes = ("random", "caterpillar", "balanced", "longspine")
    growths = (1, 2, 3, 5, 8, 20)
    sizes = (16, 64, 256, 1024)
    cfgs = []
    for i in range(count):
        n = sizes[i % 4]
        m = max(2, n * (1 + i % 7) // 10)
        cfgs.append(GenConfig(n, min(m, n), seed=10_000 + i, shape=shapes[(i // 4) % 4],
                              nh_growth=growths[(i // 16) % 6]))
    return cfgs


def test_criterion_5_confinement_bounds(capsys):
    confined = 0
    violations = []
    literal = []
    for cfg in size_family(1000):
        mt = generate(cfg)
        try:
            pl = build_pipeline(mt)
        except DegenerateTreeError:
            continue
        rep = check_size_bounds_report(mt, pl)
        confined += len(rep.confined)
        violations.extend(rep.violations)
        literal.extend(rep.literal_violations)
    at_zero = sum(1 for c in violations if c.delta == 0)
    strict = sum(1 for c in violations if c.strict)
    literal_at_zero = sum(1 for c in literal if c.delta == 0)
    worst = max(violations, key=lambda c: c.size - c.guarded_bound, default=None)
    ok = not violations
    report(capsys, 5, "|nh| <= max(1, 4d) (L) / max(1, 10d) (five)", ok,
           f"{confined} confined neighbourhoods, {len(violations)} guarded violations "
           f"({at_zero} at delta 0, {strict} strictly confined), {len(literal)} literal "
           f"violations ({literal_at_zero} at delta 0)"
           + (f", worst {worst.kind} size {worst.size} at delta {worst.delta}" if worst else ""))
    assert not violations, violations[:5]


# ---------------------------------------------------------------------------
# 6: pigeonhole
# ---------------------------------------------------------------------------

def test_criterion_6_pigeonhole(capsys):
    rng = np.random.default_rng(2024)
    failures = []
    for _ in range(10_000):
        counts, m, x = random_pigeonhole(rng)
        inst = PigeonholeInstance(counts, m, x)
        if not check_pigeonhole(inst):
            failures.append(inst)
    tight = [tight_pigeonhole(m, x, j) for m, x, j in ((20, 3, 1), (7, 0, 2), (13, 9, 3))]
    equal = all(t.k_x == t.bound and check_pigeonhole(t) for t in tight)
    ok = not failures and equal
    report(capsys, 6, "k_x <= c m / (x + 1)", ok,
           f"10000 random instances, {len(failures)} failures; tight cases equal: {equal}")
    assert ok


# ---------------------------------------------------------------------------
# 7: linear step counts
# ---------------------------------------------------------------------------

def bench_rows(argv):
    buf = io.StringIO()
    old = sys.stdout
    sys.stdout = buf
    try:
        assert cli_main(["bench", *argv]) == 0
    finally:
        sys.stdout = old
    return list(csv.DictReader(io.StringIO(buf.getvalue())))


def test_criterion_7_linear_steps(capsys):
    t0 = time.perf_counter()
    rows = bench_rows(["--sizes", "2^10..2^16", "--p-list", "1/2"])
    ratios = [int(r["steps"]) / int(r["n"]) for r in rows]
    med = float(np.median(ratios))
    spread = max(abs(x - med) / med for x in ratios)
    pair = bench_rows(["--sizes", "2^14", "--p-list", "1/2,9/10"])
    half, tenth = (int(r["steps"]) for r in pair)
    seconds = time.perf_counter() - t0
    ok = spread <= 0.15 and tenth <= 6 * half and seconds < 60
    report(capsys, 7, "steps/n flat and p-scaling bounded", ok,
           f"steps/n {', '.join(f'{x:.3f}' for x in ratios)} (max deviation {spread:.1%}); "
           f"n=2^14: {tenth} steps at 9/10 vs {half} at 1/2 (x{tenth / half:.2f}); {seconds:.1f}s")
    assert spread <= 0.15
    assert tenth <= 6 * half
    assert seconds < 60


# ---------------------------------------------------------------------------
# 8: worked example
# ---------------------------------------------------------------------------

def test_criterion_8_worked_example(worked_example, capsys):
    st = analyze(worked_example)
    n_l, n_five = st.count(ComponentKind.L), st.count(ComponentKind.FIVE)
    six = [sp for sp in st.spines if len(sp) == 6]
    delims = ({st.labeling.label(d) for d in six[0].delimiters} if len(six) == 1 else set())
    ok = ((n_l, n_five, len(st.ungrouped)) == (3, 2, 1) and len(six) == 1
          and delims == {NodeLabel.L, NodeLabel.J})
    report(capsys, 8, "worked example structure", ok,
           f"{n_l} L-components, {n_five} five-components, {len(st.ungrouped)} ungrouped, "
           f"{len(six)} spine(s) of 6 delimited by {sorted(d.value for d in delims)}")
    assert ok


# ---------------------------------------------------------------------------
# 9: determinism across processes
# ---------------------------------------------------------------------------

def cli_outputs(tmp, tag, inst):
    outs = {}
    commands = {
        "select": ["select", "--in", inst, "--p", "3/4", "--out", tmp / f"sel{tag}.json",
                   "--stats", tmp / f"stats{tag}.json"],
        "dot": ["render", "--in", inst, "--selection", tmp / f"sel{tag}.json",
                "--out", tmp / f"r{tag}.dot"],
        "svg": ["render", "--in", inst, "--format", "svg", "--out", tmp / f"r{tag}.svg"],
    }
    for cmd in commands.values():
        proc = subprocess.run([sys.executable, "-m", "leafselect.cli", *map(str, cmd)],
                              capture_output=True, timeout=600)
        assert proc.returncode == 0, proc.stderr
    for base, ext in (("sel", "json"), ("stats", "json"), ("r", "dot"), ("r", "svg")):
        outs[f"{base}.{ext}"] = (tmp / f"{base}{tag}.{ext}").read_bytes()
    return outs


def test_criterion_9_determinism(tmp_path, capsys):
    from leafselect.io import write_instance
    inst = tmp_path / "inst.json"
    write_instance(inst, generate(GenConfig(2000, 600, seed=9, nh_growth=4)))
    adv = tmp_path / "adv.json"
    write_instance(adv, generate(ADVERSARIAL))
    same = True
    for path in (inst, adv):
        first = cli_outputs(tmp_path, "a", path)
        second = cli_outputs(tmp_path, "b", path)
        same &= first == second
    report(capsys, 9, "byte-identical select, stats and render output", same,
           "two processes per instance, 2 instances, 4 files each")
    assert same
