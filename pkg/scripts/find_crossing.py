"""Search the quadrupole spectrum for same-symmetry avoided crossings.

Levels are computed per C2v symmetry class (parity under x -> -x and
y -> -y) by restricting the single-layer kernel to symmetry-adapted
densities, so levels of different classes never interfere.  For each class
the script tracks levels over a list of deformations and reports the pairs
whose spacing has an interior minimum.

Used once to pick the frozen reproduction window in
``configs/reference_sweep.yaml``; not part of the library.

    python scripts/find_crossing.py --k-max 14 --out levels.json
"""
import argparse
import json
import time

import numpy as np

from quadloc.bem import assemble_kernel, golden_section_min, scan_grid
from quadloc.geometry import ShapeParams, discretize_boundary

CLASSES = {"++": (1, 1), "+-": (1, -1), "-+": (-1, 1), "--": (-1, -1)}


def symmetry_bases(M):
    j = np.arange(M)
    rx = np.zeros((M, M))
    ry = np.zeros((M, M))
    rx[j, (M // 2 - j) % M] = 1.0   # x -> -x : phi -> pi - phi
    ry[j, (-j) % M] = 1.0           # y -> -y : phi -> -phi
    eye = np.eye(M)
    bases = {}
    for name, (px, py) in CLASSES.items():
        q = 0.25 * (eye + px * rx) @ (eye + py * ry)
        w, v = np.linalg.eigh(q)
        bases[name] = v[:, w > 0.5]
    return bases


def class_sigmas(mesh, bases, k):
    A = assemble_kernel(mesh, k).entries
    return {c: np.linalg.svd(A @ b, compute_uv=False)[-1] for c, b in bases.items()}


def levels_at(eps, M, k_lo, k_hi, step, tol=1e-8):
    mesh = discretize_boundary(ShapeParams(eps), M)
    bases = symmetry_bases(M)
    ks = scan_grid(k_lo, k_hi, step)
    prof = {c: [] for c in CLASSES}
    for k in ks:
        for c, s in class_sigmas(mesh, bases, k).items():
            prof[c].append(s)
    out = {}
    for c in CLASSES:
        s = np.array(prof[c])
        thr = 1e-2 * np.median(s)
        A_c = lambda k, c=c: np.linalg.svd(assemble_kernel(mesh, k).entries @ bases[c],
                                           compute_uv=False)[-1]
        roots = []
        for i in range(1, len(ks) - 1):
            if s[i] < s[i - 1] and s[i] <= s[i + 1]:
                k0, f0 = golden_section_min(A_c, ks[i - 1], ks[i + 1], tol)
                if f0 < thr:
                    roots.append(k0)
        out[c] = roots
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eps", type=float, nargs="+",
                    default=[0.079, 0.085, 0.088, 0.091, 0.094, 0.097, 0.103])
    ap.add_argument("--elements", type=int, default=300)
    ap.add_argument("--k-min", type=float, default=2.0)
    ap.add_argument("--k-max", type=float, default=14.0)
    ap.add_argument("--step", type=float, default=0.005)
    ap.add_argument("--out", default="levels.json")
    args = ap.parse_args()
    data = {}
    for eps in args.eps:
        t = time.time()
        data[str(eps)] = levels_at(eps, args.elements, args.k_min, args.k_max, args.step)
        print(f"eps={eps}: {sum(map(len, data[str(eps)].values()))} levels "
              f"in {time.time() - t:.0f}s", flush=True)
        with open(args.out, "w") as fh:
            json.dump(data, fh, indent=1)


if __name__ == "__main__":
    main()
