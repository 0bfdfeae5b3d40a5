#!/usr/bin/env python3
"""Writes the bundled NACA0021 static polar (data/naca0021.polar).

Pre-stall: linear lift slope 5.73 /rad with a parabolic drag bucket.
Post-stall: flat-plate extension cl = 1.1 sin(2a), cd = 1.8 sin^2(a) + 0.02.
The two regions are blended linearly between 11 and 25 degrees.
The data is synthetic and meant for tests and desk-scale runs only.
"""
import math
import sys

SLOPE = 5.73
STALL_DEG = 11.0
FLAT_DEG = 25.0


def pre_stall(a):
    return SLOPE * a, 0.0085 + 0.012 * (a / math.radians(STALL_DEG)) ** 2


def flat_plate(a):
    return 1.1 * math.sin(2.0 * a), 1.8 * math.sin(a) ** 2 + 0.02


def coefficients(alpha_deg):
    sign = -1.0 if alpha_deg < 0 else 1.0
    mag = abs(alpha_deg)
    a = math.radians(mag)
    if mag <= STALL_DEG:
        cl, cd = pre_stall(a)
    elif mag >= FLAT_DEG:
        cl, cd = flat_plate(a)
    else:
        w = (mag - STALL_DEG) / (FLAT_DEG - STALL_DEG)
        cl0, cd0 = pre_stall(math.radians(STALL_DEG))
        cl1, cd1 = flat_plate(math.radians(FLAT_DEG))
        cl, cd = cl0 + w * (cl1 - cl0), cd0 + w * (cd1 - cd0)
    if mag == 180.0:
        cl = 0.0
    return sign * cl, cd


def main(path):
    with open(path, "w", newline="\n") as f:
        f.write("# NACA0021 static polar, synthetic (thin-airfoil pre-stall, flat-plate post-stall)\n")
        f.write("# Not measured data. Supply a measured polar for quantitative work.\n")
        f.write("# name: NACA0021\n# symmetric: true\n# reynolds: 4.0e5\n")
        f.write("# alpha_deg, cl, cd\n")
        for deg in range(-180, 181):
            cl, cd = coefficients(float(deg))
            if cl == 0.0:
                cl = 0.0
            f.write(f"{deg}, {cl:.6f}, {cd:.6f}\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/naca0021.polar")
