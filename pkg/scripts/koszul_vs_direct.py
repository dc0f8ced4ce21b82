"""Compare the Koszul spectral sequence for A(1) with direct minimal resolutions."""

from __future__ import annotations

import argparse
from dataclasses import dataclass, field

from tmfmi.cli import load_module
from tmfmi.koszul import closed_form_a0, e1_page, run_n1
from tmfmi.modules import trivial


@dataclass
class Config:
    modules: list[str] = field(default_factory=lambda: ["f2_a1", "v0_a1", "sigma_p_m9_a1", "a1_mod_a0"])
    s_max: int = 12
    t_max: int = 30


def main(cfg: Config) -> None:
    page = e1_page(1, trivial(1), (cfg.s_max, cfg.t_max))
    agree = [s for s in range(cfg.s_max + 1) if closed_form_a0(s, (cfg.s_max, cfg.t_max)) == page.column(s)]
    print(f"closed form agrees with the E1 column for sigma in {agree}")
    for name in cfg.modules:
        run = run_n1(load_module(name), (cfg.s_max, cfg.t_max), check=False)
        bad = run.mismatches()
        e1 = sum(run.e1.dims.values())
        einf = sum(run.e_infinity.dims.values())
        print(f"{name:<16} dim E1 {e1:>4}  dim E2 {einf:>4}  direct {sum(run.direct.values()):>4}  "
              f"mismatched bidegrees {len(bad)}")
        for s, t, a, b in bad[:6]:
            print(f"    (s,t)=({s},{t}): E2 total {a}, direct {b}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("modules", nargs="*")
    p.add_argument("--s-max", type=int, default=Config.s_max)
    p.add_argument("--t-max", type=int, default=Config.t_max)
    a = p.parse_args()
    cfg = Config(s_max=a.s_max, t_max=a.t_max)
    if a.modules:
        cfg.modules = a.modules
    main(cfg)
