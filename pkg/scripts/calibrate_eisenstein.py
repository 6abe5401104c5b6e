"""Fit the normalization unit of the weight-kappa Eisenstein series by the S-transformation law.

Strips the frozen unit from the n > 0 coefficients, refits it at several tau,
and prints the fitted unit, its distance to the frozen value and the probe defect.
"""
import argparse
from dataclasses import dataclass

from arivol.eisen import NORMALIZATION, EisensteinLattice, calibrate_normalization, modularity_defect, q_expansion
from arivol.suites import A_PLUS_H, A_PLUS_H_PLUS_2


@dataclass
class Config:
    n_max: int = 8
    taus: tuple = (1j, 0.2 + 1.3j, -0.35 + 1.05j, 1.1j)


def run(cfg: Config):
    for name, gram in (("(2,2)", A_PLUS_H), ("(3,2)", A_PLUS_H_PLUS_2)):
        L = EisensteinLattice.of(gram)
        unit = NORMALIZATION[L.signature[0] % 2]
        co = q_expansion(L, cfg.n_max)
        raw = {n: c if n == 0 else c / unit for n, c in co.items()}
        K = calibrate_normalization(L, raw, cfg.taus)
        print(f"{name}: kappa={L.kappa}  |L'/L|={L.D.order}  fitted unit={K:.12f}  "
              f"|fitted - frozen|={abs(K - unit):.2e}")
        for tau in cfg.taus:
            print(f"    tau={tau}: defect {modularity_defect(L, co, tau):.2e}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-max", type=int, default=Config.n_max)
    run(Config(n_max=ap.parse_args().n_max))
