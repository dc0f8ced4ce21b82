"""Algebraic Mahowald invariants of h0^k over A(1), and a few over A(2)."""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from tmfmi.mahowald import algebraic_mi


@dataclass
class Config:
    k_max: int = 8
    tmf_classes: tuple[str, ...] = ("h0", "h0^2", "h0^3", "h1", "h1^2", "alpha", "beta")
    N_max: int = 40


def main(cfg: Config) -> None:
    print("over A(1):")
    for k in range(cfg.k_max + 1):
        x = "1" if k == 0 else "h0" if k == 1 else f"h0^{k}"
        print("  " + algebraic_mi(1, x, cfg.N_max).report_line())
    print("over A(2):")
    for x in cfg.tmf_classes:
        try:
            print("  " + algebraic_mi(2, x, cfg.N_max).report_line())
        except (ArithmeticError, RuntimeError, ValueError) as e:
            print(f"  {x}: {e}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--k-max", type=int, default=Config.k_max)
    p.add_argument("--n-max", type=int, default=Config.N_max)
    a = p.parse_args()
    main(Config(k_max=a.k_max, N_max=a.n_max))
