#!/usr/bin/env python3
"""Convert LASA handwriting .mat files into the 2-D demonstration CSV layout.

Each demo in <Shape>.mat becomes <out>/<Shape>/demo_<k>.csv with header
t,px,py,vx,vy. LASA positions are millimetres; they are written in metres.
"""
import argparse
import pathlib

import numpy as np
import scipy.io as sio


def convert(mat_path: pathlib.Path, out_dir: pathlib.Path) -> int:
    m = sio.loadmat(mat_path, squeeze_me=True, struct_as_record=False)
    shape_dir = out_dir / mat_path.stem
    shape_dir.mkdir(parents=True, exist_ok=True)
    demos = np.atleast_1d(m["demos"])
    for k, d in enumerate(demos):
        pos = np.asarray(d.pos, dtype=float) * 1e-3
        vel = np.asarray(d.vel, dtype=float) * 1e-3
        t = np.asarray(d.t, dtype=float).reshape(-1)
        rows = np.column_stack([t, pos[0], pos[1], vel[0], vel[1]])
        with open(shape_dir / f"demo_{k:02d}.csv", "w", newline="\n") as f:
            f.write("t,px,py,vx,vy\n")
            for r in rows:
                f.write(",".join(repr(float(v)) for v in r) + "\n")
    return len(demos)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("mat", nargs="+", type=pathlib.Path)
    ap.add_argument("-o", "--out", type=pathlib.Path, required=True)
    args = ap.parse_args()
    for p in args.mat:
        n = convert(p, args.out)
        print(f"{p.stem}: {n} demos")


if __name__ == "__main__":
    main()
