"""Headline constants for several real quadratic fields, exactly and numerically."""
import argparse
from dataclasses import dataclass

import mpmath

from arivol import constants as C
from arivol.specialvals import zetaF2_rational_part, zetaF_minus1


@dataclass
class Config:
    fields: tuple = (5, 8, 12, 13, 17, 21, 24, 28, 29)
    prec: int = 128


def run(cfg: Config):
    print(f"{'dF':>3} {'zeta_F(-1)':>10} {'rat. zeta_F(2)':>14} {'first red.':>10}  "
          f"{'thm_main':>24} {'hormann':>24} {'borcherds':>24}")
    for d in cfg.fields:
        nums = []
        for x in (C.thm_main_constant(d), C.hormann_constant(d), C.borcherds_integral_constant(d)):
            v = C.numeric_eval(x, d, cfg.prec)
            with mpmath.workprec(cfg.prec):
                nums.append(mpmath.nstr(v.value, 20))
        print(f"{d:3d} {str(zetaF_minus1(d)):>10} {str(zetaF2_rational_part(d)):>14} "
              f"{str(C.first_reduction_check(d)):>10}  " + " ".join(f"{s:>24}" for s in nums))
    print("\nthm_main(dF) =", C.thm_main_constant(5).to_json().replace("(5)", "(dF)"))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--prec", type=int, default=128)
    run(Config(prec=ap.parse_args().prec))
