"""Regenerate src/tmfmi/data/tmf_ring.txt, the curated pi_*(tmf) table.

The torsion-free part and the eta-multiples of c4^i Delta^k follow the
modular-forms pattern and are generated.  The remaining torsion is listed by
hand below, block by block in powers of Delta.  Products by eta and nu are
formal monomial products, kept when the product is a listed class, with the
overrides in ``ZERO_PRODUCTS``.
"""

from __future__ import annotations

import sys
from pathlib import Path

from tmfmi.ahss import GENERATORS, Monomial, canonical, name_degree, parse_sum

TOP = 192
A_K = [1, 8, 4, 8, 2, 8, 4, 8, 1]  # a_k Delta^k lies in the image of pi_* -> MF_*

# (name, order, Adams filtration)
TORSION = [
    # Delta^0
    ("eta", 2, 1), ("eta^2", 2, 2), ("nu", 8, 1), ("nu^2", 2, 2), ("eps", 2, 3), ("eta.eps", 2, 4),
    ("kappa", 2, 4), ("eta.kappa", 2, 5), ("nu.kappa", 2, 5),
    ("kbar", 8, 4), ("eta.kbar", 2, 5), ("eta^2.kbar", 2, 6),
    ("eps.kbar", 2, 8), ("kappa.kbar", 2, 8), ("eta.kappa.kbar", 2, 9),
    ("kbar^2", 4, 8), ("eta.kbar^2", 2, 9), ("eta^2.kbar^2", 2, 10), ("kappa.kbar^2", 2, 12),
    ("kbar^3", 2, 12), ("eta.kbar^3", 2, 13), ("eta^2.kbar^3", 2, 14),
    ("kbar^4", 2, 16), ("eta.kbar^4", 2, 17), ("eta^2.kbar^4", 2, 18),
    ("kbar^5", 2, 20), ("eta.kbar^5", 2, 21),
    # Delta^1
    ("eta.D", 2, 5), ("eta^2.D", 2, 6), ("2.nu.D", 2, 6), ("q", 2, 7),
    ("eta.kappa.D", 2, 9), ("eta.kbar.D", 2, 10), ("eta.kbar^2.D", 2, 14), ("eta.kbar^5.D", 2, 26),
    # Delta^2
    ("eta^2.D^2", 2, 10), ("nu.D^2", 2, 9), ("eta^2.nu.D^2", 2, 11), ("nu^2.D^2", 4, 10),
    ("eps.D^2", 2, 11), ("eta.eps.D^2", 2, 12), ("nu.eps.D^2", 2, 12),
    ("eta^2.kbar.D^2", 2, 15), ("eta^2.kbar^2.D^2", 2, 19),
    # Delta^3
    ("eta^3.D^3", 2, 16),
    # Delta^4
    ("eta.D^4", 2, 17), ("eta^2.D^4", 2, 18), ("nu.D^4", 8, 17), ("nu^2.D^4", 2, 18),
    ("eps.D^4", 2, 19), ("eta.eps.D^4", 2, 20), ("kappa.D^4", 4, 20), ("eta.kappa.D^4", 2, 21),
    ("2.kbar.D^4", 4, 23), ("eta.kbar.D^4", 2, 24), ("kappa^2.D^4", 2, 24), ("kappa.kbar.D^4", 2, 24),
    ("q.D^4", 2, 23), ("kappa^3.D^4", 2, 28),
    # Delta^5
    ("eta^2.D^5", 2, 24), ("2.nu.D^5", 2, 22), ("eta^2.nu.D^5", 2, 23),
    ("eta.kappa.D^5", 2, 25), ("2.nu.kappa.D^5", 2, 27), ("eta^2.kbar.D^5", 2, 30),
    # Delta^6
    ("nu.D^6", 8, 25), ("nu^2.D^6", 4, 26), ("eps.D^6", 2, 27), ("eta.eps.D^6", 2, 28),
    ("nu.eps.D^6", 2, 28), ("nu.kappa.D^6", 2, 29), ("eta.nu.kappa.D^6", 2, 30),
    ("nu^2.kappa.D^6", 2, 31),
]

ALIASES = [
    ("eta^3", "4.nu"), ("nu^3", "eta.eps"), ("nu^2.kappa", "4.kbar"),
    ("nu^3.D^2", "eta.eps.D^2"), ("eta^3.D^4", "4.nu.D^4"), ("nu^3.D^4", "eta.eps.D^4"),
    ("nu^2.kappa.D^4", "4.kbar.D^4"), ("eta^2.kbar^3.D^2", "2.kappa.D^4"),
    ("eta^3.D^6", "4.nu.D^6"), ("nu^3.D^6", "eta.eps.D^6"),
]

# formal products that vanish although the monomial names a class: these
# names denote products with Delta-family generators, not multiples by eta or nu
ZERO_PRODUCTS = {
    ("eta", "eps.D^2"), ("nu", "eps.D^2"), ("eta", "eps.D^6"), ("nu", "eps.D^6"),
    ("eta", "nu.kappa.D^6"), ("nu", "nu.kappa.D^6"),
}

BRACKETS = [
    # three-fold brackets in the sphere and in tmf
    ("eta,2,eta", "2.nu"), ("nu^2,2,eta", "eps"),
    ("eta,nu,eta", "nu^2"), ("nu,eta,nu", "eps"), ("2.nu,nu,eta", "eps"), ("eta.kappa,eta,nu", "2.kbar"),
    ("kappa,2,eta,nu", "kbar"),
    # values read off the explicit differential lists
    ("eta.D,2,eta", "2.nu.D"), ("nu^3.D^2,2,eta", "nu.eps.D^2"), ("nu^2.D^4,2,eta", "eps.D^4"),
    ("eta.kappa.D^5,2,eta", "2.nu.kappa.D^5"), ("nu^3.D^6,2,eta", "nu.eps.D^6"),
    ("2.kbar^2,eta,2", "eta^2.kbar^2"), ("2.nu.D^5,eta,2", "eta^2.nu.D^5"),
    ("eta.kappa.D^4,eta,nu", "2.kbar.D^4"),
    ("eta.kappa,nu,eta", "nu^2.kappa"), ("2.nu^2.D^2,nu,eta", "nu.eps.D^2"),
    ("eta.kappa.D^4,nu,eta", "nu^2.kappa.D^4"),
    ("eta.kappa.D,2,eta,nu", "eta.kbar.D"), ("eta.kappa.D^4,2,eta,nu", "eta.kbar.D^4"),
    ("kappa^2.D^4,2,eta,nu", "kappa.kbar.D^4"),
    # Delta^k translates of eps in <nu, eta, nu>
    ("nu.D^2,eta,nu", "eps.D^2"), ("nu.D^4,eta,nu", "eps.D^4"), ("nu.D^6,eta,nu", "eps.D^6"),
]

EXPLICIT = [
    (3, "3", 4, "nu^2", "eps", "d3 list"),
    (3, "3", 4, "D.eta", "D.2nu", "d3 list"),
    (3, "3", 4, "nu.D^2.nu^2", "nu.D^2.eps", "d3 list"),
    (3, "3", 4, "nu.D^4.nu", "eps.D^4", "d3 list"),
    (3, "3", 4, "kappa.D^4.eta.D", "kappa.D^4.2nu.D", "d3 list"),
    (3, "3", 4, "nu.D^6.nu^2", "nu.D^6.eps", "d3 list"),
    (3, "1", 4, "2kbar^2", "eta^2.kbar^2", "d3 list"),
    (3, "1", 4, "nu.D^5.2", "nu.D^5.eta^2", "d3 list"),
    (6, "6", 8, "kappa.D^4.eta", "2.D^4.kbar", "d6 list"),
    (6, "1", 8, "kappa.eta", "kappa.nu^2", "d6 list"),
    (6, "1", 8, "nu.D^2.2nu", "nu.D^2.eps", "d6 list"),
    (6, "1", 8, "kappa.D^4.eta", "kappa.D^4.nu^2", "d6 list"),
    (7, "7", 8, "kappa", "kbar", "d7 list"),
    (7, "7", 8, "eta.D.kappa", "eta.D.kbar", "d7 list"),
    (7, "7", 8, "kappa.D^4.eta", "eta.D^4.kbar", "d7 list"),
    (7, "7", 8, "kappa.D^4.kappa", "kappa.D^4.kbar", "d7 list"),
]


def free_generators():
    out = []
    for k in range(TOP // 24 + 1):
        a = A_K[k]
        name = "1" if k == 0 else f"{a}.D^{k}" if a > 1 else f"D^{k}"
        out.append((canonical(name), None, 4 * k + a.bit_length() - 1))
        for i in range(1, (TOP - 24 * k) // 8 + 1):
            out.append((canonical(f"c4^{i}.D^{k}"), None, 4 * i + 4 * k))
        for i in range(0, (TOP - 24 * k - 12) // 8 + 1):
            out.append((canonical(f"2.c6.c4^{i}.D^{k}"), None, 4 + 4 * i + 4 * k))
    return out


def bo_torsion():
    out = []
    for k in range(TOP // 24 + 1):
        for i in range(1, TOP):
            for j in (1, 2):
                deg = 8 * i + 24 * k + j
                if deg <= TOP:
                    out.append((canonical(f"eta^{j}.c4^{i}.D^{k}"), 2, 4 * i + 4 * k + j))
    return out


def layer_names(gens, aliases):
    names = {}
    for name, order, _ in gens:
        m = next(iter(parse_sum(name)))
        length = 1 if order is None else order.bit_length() - 1
        for j in range(length):
            c = Monomial(m.two + j, m.exps).ascii()
            names[aliases.get(c, c)] = (name, j)
    return names


def product(op: str, name: str, layers, aliases) -> str:
    if (op, name) in ZERO_PRODUCTS:
        return "0"
    x = next(iter(parse_sum(name)))
    other = {"eta": "nu", "nu": "eta"}[op]
    if x.exps[GENERATORS.index(other)]:
        return "0"  # eta * nu = 0
    m = x * next(iter(parse_sum(op)))
    c = m.ascii()
    c = aliases.get(c, c)
    return c if c in layers else "0"


def build() -> str:
    gens = free_generators() + bo_torsion() + [(canonical(n), o, af) for n, o, af in TORSION]
    aliases = {canonical(a): canonical(b) for a, b in ALIASES}
    layers = layer_names(gens, aliases)
    lines = [
        "# pi_*(tmf) at p = 2 in degrees 0..192, curated for the Tate AHSS.",
        "# deg <t>: <name> order <2^k|free> af <Adams filtration>",
        "# alias <monomial> = <class>; mul <eta|nu> <generator> = <sum|0>",
        "# bracket <x>,<a>,<b>[,<c>] = <class>; explicit d<r> <residues> mod <m>: <source> -> <target> ; <tag>",
        "",
    ]
    for name, order, af in sorted(gens, key=lambda g: (name_degree(g[0]), g[0])):
        lines.append(f"deg {name_degree(name)}: {name} order {'free' if order is None else order} af {af}")
    lines.append("")
    for a, b in ALIASES:
        lines.append(f"alias {canonical(a)} = {canonical(b)}")
    lines.append("")
    for name, _, _ in sorted(gens, key=lambda g: (name_degree(g[0]), g[0])):
        for op in ("eta", "nu"):
            if name_degree(name) + (1 if op == "eta" else 3) <= TOP:
                lines.append(f"mul {op} {name} = {product(op, name, layers, aliases)}")
    lines.append("")
    for lhs, val in BRACKETS:
        lines.append(f"bracket {lhs} = {val}")
    lines.append("")
    for r, res, mod, src, tgt, tag in EXPLICIT:
        lines.append(f"explicit d{r} {res} mod {mod}: {canonical(_tidy(src))} -> {canonical(_tidy(tgt))} ; {tag}")
    return "\n".join(lines) + "\n"


def _tidy(name: str) -> str:
    # "2nu" and "2kbar" read as 2.nu and 2.kbar
    return ".".join(f"2.{t[1:]}" if t[:1] == "2" and t[1:2].isalpha() else t for t in name.split("."))


if __name__ == "__main__":
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parents[1] / "src/tmfmi/data/tmf_ring.txt"
    out.write_text(build())
    print(f"wrote {out}")
