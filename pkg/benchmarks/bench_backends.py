#!/usr/bin/env python3
"""Compare the compiled extension against the pure-Python fallback.

Three benchmarks:
  histogram   independent-set size histograms on random conflict graphs
  engine      the phase-1 counter engine replaying a recorded transition tape
  pipeline    a full colouring run per backend (subprocesses, FANCOLOUR_PURE)

Usage: python benchmarks/bench_backends.py [--quick]
"""

from __future__ import annotations

import argparse
import os
import random
import subprocess
import sys
import tempfile
import time
from array import array

from fancolour import Graph, build_list_cover, uniform_lists, write_graph
from fancolour import _purecore

try:
    from fancolour import _fastcore
except ImportError:
    _fastcore = None


def bench_histogram(reps: int) -> None:
    rng = random.Random(0)
    cases = []
    for _ in range(50):
        n = rng.randint(14, 20)
        masks = [0] * n
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < 0.25:
                    masks[i] |= 1 << j
                    masks[j] |= 1 << i
        cases.append((masks, n))
    for name, mod in _backends():
        t0 = time.perf_counter()
        for _ in range(reps):
            for masks, n in cases:
                mod.size_histogram(masks, n)
        print(f"  histogram [{name}]: {time.perf_counter() - t0:.3f}s")


def _engine_setup(mod, cover):
    n, ncols = cover.base.n, cover.num_colours
    list_start, owner, conf_start, conf_flat = cover.engine_tables()
    state = array("i", [0] * n)
    value = array("i", [-1] * n)
    elim = array("i", [0] * ncols)
    degstar = array("i", [len(cover.conflicts[x]) for x in range(ncols)])
    n_alive = array("i", [cover.list_size(u) for u in range(n)])
    n_heavy = array(
        "i",
        [sum(1 for x in cover.colours_of(u) if degstar[x] >= 1) for u in range(n)],
    )
    return mod.Engine(
        n, ncols, 2.0, 1, list_start, owner, conf_start, conf_flat,
        state, value, elim, degstar, n_alive, n_heavy,
    )


def bench_engine(reps: int) -> None:
    rng = random.Random(1)
    g = Graph(
        150,
        [
            (u, v)
            for u in range(150)
            for v in range(u + 1, 150)
            if rng.random() < 0.04
        ],
    )
    cover = build_list_cover(g, uniform_lists(g.n, 8))
    tape = []
    occupied = [False] * g.n
    for _ in range(30000):
        v = rng.randrange(g.n)
        r = rng.random()
        if r < 0.45 and not occupied[v]:
            tape.append((v, 1, rng.choice(list(cover.colours_of(v)))))
            occupied[v] = True
        else:
            tape.append((v, 0, -1))
            occupied[v] = False
    for name, mod in _backends():
        eng = _engine_setup(mod, cover)
        t0 = time.perf_counter()
        for _ in range(reps):
            for move in tape:
                eng.apply(*move)
            eng.least_b_flaw()
        print(f"  engine [{name}]: {time.perf_counter() - t0:.3f}s")


def bench_pipeline(runs: int) -> None:
    with tempfile.TemporaryDirectory() as tmp:
        gpath = os.path.join(tmp, "g.txt")
        subprocess.run(
            [
                sys.executable, "-m", "fancolour.cli", "generate",
                "random-regular", "--n", "200", "--degree", "10",
                "--seed", "5", "--triangle-free", "--out", gpath,
            ],
            check=True,
            capture_output=True,
        )
        for name, pure in (("compiled", ""), ("pure", "1")):
            if name == "compiled" and _fastcore is None:
                continue
            env = dict(os.environ)
            if pure:
                env["FANCOLOUR_PURE"] = pure
            else:
                env.pop("FANCOLOUR_PURE", None)
            t0 = time.perf_counter()
            out = subprocess.run(
                [
                    sys.executable, "-m", "fancolour.cli", "colour",
                    "--graph", gpath, "--q", "11", "--lambda", "1",
                    "--ell", "2", "--seed", "0", "--runs", str(runs),
                    "--out", os.path.join(tmp, f"r-{name}"),
                ],
                env=env,
                capture_output=True,
            )
            assert out.returncode == 0, out.stderr.decode()
            print(f"  pipeline x{runs} [{name}]: {time.perf_counter() - t0:.3f}s")


def _backends():
    out = [("pure", _purecore)]
    if _fastcore is not None:
        out.insert(0, ("compiled", _fastcore))
    else:
        print("  (compiled backend not built; showing pure only)")
    return out


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()
    reps = 2 if args.quick else 10
    print("independent-set histograms:")
    bench_histogram(reps)
    print("flaw-counter engine:")
    bench_engine(1 if args.quick else 3)
    print("full pipeline:")
    bench_pipeline(2 if args.quick else 10)


if __name__ == "__main__":
    main()
