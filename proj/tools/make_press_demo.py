#!/usr/bin/env python3
"""Writes the synthetic press demonstration used by the contact scenarios.

The end-effector descends onto a horizontal surface, slows down near it,
touches it and presses until the encoded downward force is reached, then
holds. The recorded force follows the penetration, stiffness * depth.
"""
import argparse

import numpy as np

HEADER = "t,px,py,pz,rx,ry,rz,vx,vy,vz,wx,wy,wz,fx,fy,fz,tx,ty,tz"


def build(surface_z, stiffness, force, dt):
    depth = force / stiffness
    z_top, z_slow, z_end = surface_z + 0.15, surface_z + 0.01, surface_z - depth
    t_fast, t_slow, t_press, t_hold = 1.5, 0.5, 1.0, 1.0
    segs = []
    for za, zb, dur in ((z_top, z_slow, t_fast), (z_slow, surface_z, t_slow), (surface_z, z_end, t_press)):
        n = int(round(dur / dt))
        s = np.arange(n) / n
        segs.append(za + (zb - za) * s)
    n_hold = int(round(t_hold / dt)) + 1
    segs.append(np.full(n_hold, z_end))
    z = np.concatenate(segs)
    vz = np.gradient(z, dt)
    vz[-n_hold:] = 0.0
    fz = -stiffness * np.clip(surface_z - z, 0.0, depth)
    rows = np.zeros((len(z), 19))
    rows[:, 0] = np.arange(len(z)) * dt
    rows[:, 1] = 0.5
    rows[:, 3] = z
    rows[:, 9] = vz
    rows[:, 15] = fz
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out")
    ap.add_argument("--surface-z", type=float, default=0.2)
    ap.add_argument("--stiffness", type=float, default=10000.0)
    ap.add_argument("--force", type=float, default=15.0)
    ap.add_argument("--dt", type=float, default=0.01)
    a = ap.parse_args()
    rows = build(a.surface_z, a.stiffness, a.force, a.dt)
    with open(a.out, "w", newline="\n") as f:
        f.write(HEADER + "\n")
        for r in rows:
            f.write(",".join(repr(float(v)) for v in r) + "\n")


if __name__ == "__main__":
    main()
