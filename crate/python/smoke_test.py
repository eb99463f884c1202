#!/usr/bin/env python3
"""Smoke test for the lcaprobe extension module.

Build the extension first:

    cargo build --release -p lca-python

then run:

    python3 python/smoke_test.py
"""

import shutil
import sys
import tempfile
from pathlib import Path


def locate_extension() -> Path:
    root = Path(__file__).resolve().parent.parent
    candidates = [
        root / "target" / "release" / "liblcaprobe.so",
        root / "target" / "debug" / "liblcaprobe.so",
        root / "target" / "release" / "liblcaprobe.dylib",
        root / "target" / "debug" / "liblcaprobe.dylib",
    ]
    for c in candidates:
        if c.exists():
            return c
    sys.exit("extension not built; run: cargo build --release -p lca-python")


def main() -> None:
    ext = locate_extension()
    staging = Path(tempfile.mkdtemp(prefix="lcaprobe-"))
    shutil.copy2(ext, staging / "lcaprobe.so")
    sys.path.insert(0, str(staging))
    import lcaprobe as lca

    # Construction and structure.
    ring, meta = lca.generate_instance("ring", {"n": 64}, seed=1)
    assert ring.n == 64 and meta["family"] == "ring"
    assert ring.girth() == 64
    assert ring.is_bipartite()

    affine, _ = lca.generate_instance("affine-plane", {"p": 5})
    assert affine.n == 50 and affine.girth() == 6
    assert all(affine.degree(v) == 5 for v in range(1, 51))

    # Weak 3-coloring: probe bound, legality, agreement with the global run.
    budget = lca.t_n(ring.n) + 1
    colors = []
    for v in range(1, ring.n + 1):
        color, weak, strong = lca.weak3(ring, v)
        assert weak <= budget and strong == 0
        colors.append(color)
    ok, violators = lca.check_weak_coloring(ring, colors, 3)
    assert ok and not violators
    assert colors == lca.forest_coloring(ring)

    # Deterministic weak 2-coloring stays legal.
    colors2 = [lca.weak2_det(ring, v)[0] for v in range(1, ring.n + 1)]
    ok, _ = lca.check_weak_coloring(ring, colors2, 2)
    assert ok

    # Randomized weak 2-coloring in both probe models.
    for model in ("strong", "weak"):
        cr = [lca.weak2_rand(ring, v, 7, "arbitrary", model)[0] for v in range(1, ring.n + 1)]
        ok, _ = lca.check_weak_coloring(ring, cr, 2)
        assert ok

    # Greedy matching LCA equals the sequential greedy, edge for edge.
    greedy = set(map(tuple, lca.greedy_matching(affine, 3)))
    verdicts = []
    for (u, v) in affine.edges():
        verdict, _, _ = lca.rg_match(affine, u, v, 3)
        verdicts.append(verdict)
        assert (verdict == "matched") == ((u, v) in greedy)
    ok, metrics = lca.check_matching(affine, verdicts, "maximality")
    assert ok and metrics["matched"] == len(greedy)

    # Exact oracle on a regular bipartite instance: perfect matching.
    assert lca.max_matching_size(affine) == 25

    # Regular pipeline sweep beats the (1 - eps) target.
    bip, _ = lca.generate_instance("random-regular", {"n": 200, "d": 8, "bipartite": 1}, seed=5)
    sweep = lca.regular_match_sweep(bip, seed=2, eps=0.25)
    matched = sum(1 for v in sweep if v == "matched")
    assert matched >= 0.75 * (bip.n // 2), matched
    ok, _ = lca.check_matching(bip, sweep, "validity")
    assert ok

    # High-girth pipeline answers consistently on the incidence graph.
    u, v = affine.edges()[0]
    first = lca.high_girth_match(affine, u, v, seed=4)
    assert first in ("matched", "unmatched", "unmatched-by-budget")
    assert first == lca.high_girth_match(affine, u, v, seed=4)

    # Derived cover from the greedy matching covers the fused instance.
    fused, fmeta = lca.generate_instance("fused-vc", {"p": 3, "k": 3}, seed=6)
    cover = lca.derived_cover_size(fused, seed=1)
    assert cover <= 2 * int(fmeta["cover_bound"])

    print("smoke test passed")


if __name__ == "__main__":
    main()
