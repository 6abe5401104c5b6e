"""Convergence of the finite-difference Dolbeault Laplacian against a closed form.

For f = sin x1 e^{-2 y1} cos x2 y2^2 the total Laplacian equals
-(c/4) f (3 y1^2 + 2 - y2^2); prints the relative error and observed order per step.
"""
import argparse
from dataclasses import dataclass
from math import pi

import numpy as np

from arivol import hypcalc as hc


@dataclass
class Config:
    point: tuple = (0.3, 1.2, -0.4, 0.8)
    steps: tuple = (0.2, 0.1, 0.05, 0.025, 0.0125)


def run(cfg: Config):
    c = 16 * pi ** 2
    X = [np.array([v]) for v in cfg.point]
    f = lambda x1, y1, x2, y2: np.sin(x1) * np.exp(-2 * y1) * np.cos(x2) * y2 ** 2
    exact = -c / 4 * f(*X) * (3 * X[1] ** 2 + 2 - X[3] ** 2)
    prev = None
    for h in cfg.steps:
        got = hc.laplacian(hc.function_form(f), "total", h)(0, *X)
        err = float(abs(got - exact).max() / abs(exact).max())
        order = "" if prev is None else f"{np.log2(prev / err):6.2f}"
        print(f"h={h:<8} rel err {err:.3e}  {order}")
        prev = err


if __name__ == "__main__":
    argparse.ArgumentParser(description=__doc__.splitlines()[0]).parse_args()
    run(Config())
