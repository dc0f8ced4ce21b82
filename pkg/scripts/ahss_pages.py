"""Run the Tate AHSS over a window and write the E8 survivors chart piece by piece.

Each piece covers eight cells, mirroring the printed chart layout.
"""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass
from pathlib import Path

from tmfmi.ahss import Window, load_ring_data, periodicity_defects, render_svg, run_ahss, survivor_tsv, survivors


@dataclass
class Config:
    s_lo: int = -143
    s_hi: int = 0
    t_lo: int = 0
    t_hi: int = 7
    page: int = 8
    ring_data: str | None = None
    out: Path = Path("out/ahss")


def main(cfg: Config) -> None:
    view = Window(cfg.s_lo, cfg.s_hi, cfg.t_lo, cfg.t_hi)
    t0 = time.perf_counter()
    run = run_ahss(load_ring_data(cfg.ring_data), view=view, last=cfg.page)
    print(f"E{cfg.page} computed in {time.perf_counter() - t0:.2f}s")
    print(f"brackets looked up and missing: {len(run.log.missing_brackets)}")
    print(f"periodicity defects: {periodicity_defects(run, view, cfg.page)}")
    cfg.out.mkdir(parents=True, exist_ok=True)
    for hi in range(cfg.s_hi, cfg.s_lo - 1, -8):
        piece = Window(max(hi - 7, cfg.s_lo), hi, cfg.t_lo, cfg.t_hi)
        rows = survivors(run, piece, cfg.page)
        stem = f"e{cfg.page}_s{piece.s_lo}_{piece.s_hi}"
        (cfg.out / f"{stem}.tsv").write_text(survivor_tsv(rows))
        (cfg.out / f"{stem}.svg").write_text(render_svg(rows, piece))
    print(f"wrote {cfg.out}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--s-lo", type=int, default=Config.s_lo)
    p.add_argument("--page", type=int, default=Config.page)
    p.add_argument("--ring-data")
    p.add_argument("--out", type=Path, default=Config.out)
    a = p.parse_args()
    main(Config(s_lo=a.s_lo, page=a.page, ring_data=a.ring_data, out=a.out))
