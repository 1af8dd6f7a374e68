#!/usr/bin/env python3
"""Writes the synthetic polishing demonstration: descend onto a surface, then
trace a closed circle on it for several laps while pressing with a constant
downward force. Contact positions sit at the static penetration depth."""
import argparse

import numpy as np

HEADER = "t,px,py,pz,rx,ry,rz,vx,vy,vz,wx,wy,wz,fx,fy,fz,tx,ty,tz"


def build(center, surface_z, radius, period, laps, stiffness, force, dt):
    depth = force / stiffness
    z_c = surface_z - depth
    start = np.array([center[0] + radius, center[1], surface_z + 0.1])
    n_down = int(round(1.5 / dt))
    s = np.arange(n_down) / n_down
    down = np.outer(1 - s, start) + np.outer(s, [start[0], start[1], z_c])
    f_down = np.zeros((n_down, 3))
    near = down[:, 2] < surface_z + 0.01
    f_down[near, 2] = -force * (surface_z + 0.01 - down[near, 2]) / (0.01 + depth)
    n_loop = int(round(laps * period / dt))
    ph = 2 * np.pi * np.arange(n_loop + 1) / (period / dt)
    loop = np.stack([center[0] + radius * np.cos(ph), center[1] + radius * np.sin(ph), np.full_like(ph, z_c)], 1)
    f_loop = np.tile([0.0, 0.0, -force], (len(ph), 1))
    pos = np.vstack([down, loop])
    vel = np.gradient(pos, dt, axis=0)
    w = np.vstack([f_down, f_loop])
    rows = np.zeros((len(pos), 19))
    rows[:, 0] = np.arange(len(pos)) * dt
    rows[:, 1:4] = pos
    rows[:, 7:10] = vel
    rows[:, 13:16] = w
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out")
    ap.add_argument("--surface-z", type=float, default=0.2)
    ap.add_argument("--radius", type=float, default=0.06)
    ap.add_argument("--period", type=float, default=3.0)
    ap.add_argument("--laps", type=float, default=14.0)
    ap.add_argument("--stiffness", type=float, default=10000.0)
    ap.add_argument("--force", type=float, default=15.0)
    ap.add_argument("--dt", type=float, default=0.01)
    a = ap.parse_args()
    rows = build((0.5, 0.0), a.surface_z, a.radius, a.period, a.laps, a.stiffness, a.force, a.dt)
    with open(a.out, "w", newline="\n") as f:
        f.write(HEADER + "\n")
        for r in rows:
            f.write(",".join(repr(float(v)) for v in r) + "\n")


if __name__ == "__main__":
    main()
