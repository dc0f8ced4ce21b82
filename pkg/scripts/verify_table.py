"""Verify every derivation script and print a one-line-per-target summary."""

from __future__ import annotations

import argparse
import sys
from collections import Counter
from dataclasses import dataclass

from tmfmi.verifier import load_context, verify_all


@dataclass
class Config:
    scripts: str | None = None
    extend_to: int = 64
    verbose: bool = False


def main(cfg: Config) -> int:
    ctx = load_context()
    reports = verify_all(ctx, cfg.scripts, cfg.extend_to)
    flags: Counter[str] = Counter()
    for r in reports:
        mark = "ok  " if r.ok else "FAIL"
        extra = ",".join(r.flags)
        audit = "" if r.audit == "ok" else f"  [{r.audit}]"
        print(f"{mark} {r.key:<14} {str(r.final or '-'):<32} {extra}{audit}")
        if cfg.verbose or not r.ok:
            for no, step, v in r.lines:
                print(f"       {no:>2} {step}  -> {v}: {v.reason}")
        flags.update(f.split(":")[0] for f in r.flags)
    passed = sum(r.ok for r in reports)
    print(f"\n{passed}/{len(reports)} targets verified; flags: {dict(flags)}")
    return 0 if passed == len(reports) else 1


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--scripts")
    p.add_argument("--extend-to", type=int, default=64)
    p.add_argument("-v", "--verbose", action="store_true")
    a = p.parse_args()
    sys.exit(main(Config(a.scripts, a.extend_to, a.verbose)))
