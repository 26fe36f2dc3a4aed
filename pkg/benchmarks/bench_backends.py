"""Time the numba kernels against the pure-numpy fallback.

Each backend runs in its own interpreter because the choice is read from
``CLOSUREBISIM_PURE_NUMPY`` at import time.  Partitions are fingerprinted so
the two backends can be checked for identical output.

    python3 benchmarks/bench_backends.py [--scale 8] [--repeat 3]
"""
import argparse
import json
import os
import subprocess
import sys
import time

WORKER = r"""
import hashlib, json, sys, time
import numpy as np
from closurebisim import _kernels
from closurebisim.equivalences import equivalence
from closurebisim.io import image_to_model, palette_from_dict
from closurebisim.maze import PALETTE, generate_maze, upscale

scale, repeat = int(sys.argv[1]), int(sys.argv[2])
cfg = palette_from_dict(PALETTE)
equivalence(image_to_model(generate_maze()[:6, :6], cfg).base, "cmc")  # compile / load cache
grid = image_to_model(upscale(generate_maze(), scale), cfg)
out = {"backend": _kernels.backend_name(), "points": grid.base.n, "edges": grid.base.n_edges}
for kind in ("cmc", "copa", "path"):
    best = None
    for _ in range(repeat):
        t = time.perf_counter()
        part = equivalence(grid.base, kind)
        dt = time.perf_counter() - t
        best = dt if best is None else min(best, dt)
    out[kind] = {"seconds": best, "classes": len(part),
                 "fingerprint": hashlib.sha1(part.class_of.tobytes()).hexdigest()[:12]}
print(json.dumps(out))
"""


def run(backend, scale, repeat):
    env = dict(os.environ)
    env["CLOSUREBISIM_PURE_NUMPY"] = "1" if backend == "numpy" else "0"
    t = time.perf_counter()
    proc = subprocess.run([sys.executable, "-c", WORKER, str(scale), str(repeat)],
                          env=env, capture_output=True, text=True, check=True)
    res = json.loads(proc.stdout.strip().splitlines()[-1])
    res["wall"] = time.perf_counter() - t
    return res


def main(argv=None):
    ap = argparse.ArgumentParser(description="numba vs numpy backend timings")
    ap.add_argument("--scale", type=int, default=8, help="maze upscaling factor (8 gives 256x256)")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    results = [run(b, args.scale, args.repeat) for b in ("numba", "numpy")]
    print(f"image {32 * args.scale}x{32 * args.scale}: {results[0]['points']} points, "
          f"{results[0]['edges']} edges (best of {args.repeat})")
    print(f"{'kind':6} {'classes':>8} {'numba s':>9} {'numpy s':>9} {'speedup':>8}  same")
    same_all = True
    for kind in ("cmc", "copa", "path"):
        a, b = results[0][kind], results[1][kind]
        same = a["fingerprint"] == b["fingerprint"]
        same_all &= same
        print(f"{kind:6} {a['classes']:>8} {a['seconds']:>9.3f} {b['seconds']:>9.3f} "
              f"{b['seconds'] / a['seconds']:>7.2f}x  {'yes' if same else 'NO'}")
    return 0 if same_all else 1


if __name__ == "__main__":
    sys.exit(main())
