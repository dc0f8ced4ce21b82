"""Regenerate the module fixtures in src/tmfmi/data/modules."""

from __future__ import annotations

from pathlib import Path

from tmfmi.modules import ModulePresentation, quotient_algebra_module, save, suspended_projective, trivial
from tmfmi.steenrod import SubAlgebra

OUT = Path(__file__).resolve().parents[1] / "src/tmfmi/data/modules"


def v0() -> ModulePresentation:
    """H^*(V(0)): cells in degrees 0 and 1 joined by Sq1."""
    sq1 = SubAlgebra.get(1).index[(1,)]
    return ModulePresentation(1, 0, 1, ["x0", "x1"], [0, 1], {(sq1, 0): 0b10}, complete=True)


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    fixtures = {
        "f2_a0.txt": trivial(0),
        "f2_a1.txt": trivial(1),
        "f2_a2.txt": trivial(2),
        "v0_a1.txt": v0(),
        "sigma_p_m9_a1.txt": suspended_projective(-9, 31, 1),
        "a1_mod_a0.txt": quotient_algebra_module(1, 0),
        "a2_mod_a1.txt": quotient_algebra_module(2, 1),
    }
    for name, m in fixtures.items():
        save(m, OUT / name)
        print(f"wrote {OUT / name}")


if __name__ == "__main__":
    main()
