"""Command-line front end.

Every subcommand writes deterministic output (TSV or SVG) to ``--out`` or
stdout.  Settings come from an optional TOML file given by ``--config``;
flags on the command line override it.  Errors are reported as one line,

    error: <code>: <message>

on stderr, with exit status 2.  A verification run that completes but finds
failures exits with status 1.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import ahss, koszul, mahowald, modules, resolution, verifier

FIXTURES = "modules"


class CliError(Exception):
    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)

    def line(self) -> str:
        msg = " ".join(str(self).split())
        return f"error: {self.code}: {msg}"


@dataclass
class Settings:
    bounds: tuple[int, int] | None = None
    window: tuple[int, int] | None = None
    ring_data: str | None = None
    pins: str | None = None
    scripts: str | None = None
    format: str = "tsv"
    out: str | None = None


def _pair(text: str, flag: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in str(text).split(","))
    except ValueError:
        raise CliError("bad-argument", f"{flag} expects two integers 'A,B', got {text!r}") from None
    return a, b


def _load_config(path: str | None, command: str) -> dict:
    if not path:
        return {}
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as e:
        raise CliError("config", f"{path}: {e.strerror}") from None
    except tomllib.TOMLDecodeError as e:
        raise CliError("config", f"{path}: {e}") from None
    # top-level keys apply everywhere; a table named after the subcommand refines them
    merged = {k: v for k, v in data.items() if not isinstance(v, dict)}
    merged.update(data.get(command, {}))
    known = {f.name for f in fields(Settings)}
    extra = sorted(set(k.replace("-", "_") for k in merged) - known)
    if extra:
        raise CliError("config", f"{path}: unknown keys {', '.join(extra)}")
    return {k.replace("-", "_"): v for k, v in merged.items()}


def settings(args: argparse.Namespace) -> Settings:
    conf = _load_config(args.config, args.command)
    for f in fields(Settings):
        flag = getattr(args, f.name, None)
        if flag is not None:
            conf[f.name] = flag
    for key in ("bounds", "window"):
        if key in conf and not isinstance(conf[key], tuple):
            v = conf[key]
            conf[key] = tuple(v) if isinstance(v, list) and len(v) == 2 else _pair(v, f"--{key}")
    st = Settings(**conf)
    if st.format not in ("tsv", "svg"):
        raise CliError("bad-argument", f"--format must be tsv or svg, got {st.format!r}")
    return st


def write_output(text: str, out: str | None) -> None:
    """Write atomically: a temporary file in the target directory, then rename."""
    if out is None:
        sys.stdout.write(text)
        return
    target = Path(out)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def load_module(spec: str) -> modules.ModulePresentation:
    """A module file path, or the stem of a shipped fixture such as ``f2_a1``."""
    path = Path(spec)
    if not path.exists():
        shipped = resources.files("tmfmi").joinpath("data", FIXTURES, f"{spec}.txt")
        if not shipped.is_file():
            raise CliError("no-module", f"{spec}: no such file or shipped fixture")
        text = shipped.read_text(encoding="utf-8")
    else:
        text = path.read_text(encoding="utf-8")
    try:
        m = modules.loads(text)
    except (modules.ModuleError, ValueError) as e:
        raise CliError("bad-module", f"{spec}: {e}") from None
    problems = modules.check_action(m)
    if problems:
        raise CliError("bad-module", f"{spec}: {problems[0]}")
    return m


def fixture_names() -> list[str]:
    d = resources.files("tmfmi").joinpath("data", FIXTURES)
    return sorted(p.name[:-4] for p in d.iterdir() if p.name.endswith(".txt"))


# ------------------------------------------------------------------ ext


def _is_sphere(m: modules.ModulePresentation) -> bool:
    return len(m.degrees) == 1 and m.degrees[0] == 0


def ext_rows(chart: resolution.ExtChart) -> list[tuple[int, int, str]]:
    rows = [(s, t, nm) for (s, t) in chart.bidegrees() for nm in chart.names[(s, t)]]
    return sorted(rows)


def ext_tsv(rows: list[tuple[int, int, str]]) -> str:
    return "".join(f"{s}\t{t}\t{nm}\n" for s, t, nm in [("s", "t", "name")] + rows)


def ext_svg(rows: list[tuple[int, int, str]]) -> str:
    """(t - s, s) dot chart."""
    cw, pad = 24, 30
    stems = [t - s for s, t, _ in rows] or [0]
    ss = [s for s, _, _ in rows] or [0]
    width = (max(stems) - min(0, min(stems)) + 2) * cw + 2 * pad
    height = (max(ss) + 2) * cw + 2 * pad
    x0 = min(0, min(stems))
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    seen: dict[tuple[int, int], int] = {}
    for s, t, nm in rows:
        k = seen.get((t - s, s), 0)
        seen[(t - s, s)] = k + 1
        x = pad + (t - s - x0) * cw + 5 * k
        y = height - pad - s * cw - 5 * k
        out.append(f'<circle cx="{x}" cy="{y}" r="3"><title>{nm} ({s},{t})</title></circle>')
    for n in range(x0, max(stems) + 1, 4):
        out.append(f'<text x="{pad + (n - x0) * cw}" y="{height - 8}" font-size="10">{n}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def cmd_ext(args, st: Settings) -> int:
    m = load_module(args.module)
    s_max, t_max = st.bounds or (8, 40)
    if s_max < 0:
        raise CliError("bad-argument", "--bounds: S must be non-negative")
    if st.pins:
        pins = _pins(st.pins).get(m.n, {})
    else:
        pins = resolution.load_pins(resolution.DEFAULT_PINS).get(m.n, {}) if _is_sphere(m) else {}
    try:
        res = resolution.minimal_resolution(m, s_max, t_max)
    except resolution.WindowError as e:
        raise CliError("window", str(e)) from None
    rows = [(s, t, nm) for s, t, nm in ext_rows(resolution.ext_chart(res, pins, products=False)) if t <= t_max]
    write_output(ext_tsv(rows) if st.format == "tsv" else ext_svg(rows), st.out)
    return 0


def _pins(path: str):
    try:
        return resolution.load_pins(path)
    except OSError as e:
        raise CliError("no-pins", f"{path}: {e.strerror}") from None
    except ValueError as e:
        raise CliError("bad-pins", str(e)) from None


# ------------------------------------------------------------------ koszul


def cmd_koszul(args, st: Settings) -> int:
    m = load_module(args.module)
    if m.n < 1:
        raise CliError("bad-module", f"{args.module}: the Koszul spectral sequence needs A(n) with n >= 1")
    if st.format != "tsv":
        raise CliError("bad-argument", "koszul writes tsv only")
    bounds = st.bounds or (6, 24)
    page = koszul.e1_page(m.n, m, bounds)
    lines = ["s\tt\tsigma\tdim"]
    lines += [f"{s}\t{t}\t{g}\t{d}" for (g, s, t), d in sorted(page.dims.items(), key=lambda kv: (kv[0][1], kv[0][2], kv[0][0])) if d]
    write_output("\n".join(lines) + "\n", st.out)
    return 0


# ------------------------------------------------------------------ stunted


def cmd_stunted(args, st: Settings) -> int:
    if args.bottom > args.top:
        raise CliError("bad-argument", f"empty window: bottom {args.bottom} > top {args.top}")
    if args.profile < 0:
        raise CliError("bad-argument", "--profile must be non-negative")
    try:
        m = modules.stunted_projective(args.bottom, args.top, args.profile, shift=args.shift)
    except modules.ModuleError as e:
        raise CliError("bad-argument", str(e)) from None
    write_output(modules.dumps(m), st.out)
    return 0


# ------------------------------------------------------------------ mi-alg


def cmd_mi_alg(args, st: Settings) -> int:
    if st.format != "tsv":
        raise CliError("bad-argument", "mi-alg writes tsv only")
    lines = ["name\tN\ts\tt\ttarget\tindeterminacy"]
    rows = []
    for name in args.classes:
        try:
            mi = mahowald.algebraic_mi(args.profile, name, N_max=args.n_max)
        except KeyError:
            raise CliError("unknown-class", f"{name}: not a named class of Ext over A({args.profile - 1})") from None
        except (ValueError, ArithmeticError, RuntimeError) as e:
            raise CliError("mi", f"{name}: {e}") from None
        s, t = mi.target
        rows.append((s, t, name, f"{name}\t{mi.N}\t{s}\t{t}\t{mi.describe()}\t{len(mi.indeterminacy)}"))
    lines += [r[-1] for r in sorted(rows)]
    write_output("\n".join(lines) + "\n", st.out)
    return 0


# ------------------------------------------------------------------ ahss


def _ring(path: str | None) -> ahss.TmfRingData:
    try:
        return ahss.load_ring_data(path)
    except OSError as e:
        raise CliError("no-ring-data", f"{path}: {e.strerror}") from None
    except ahss.RingDataError as e:
        raise CliError("bad-ring-data", f"{path or 'shipped ring data'}: {e}") from None


def cmd_ahss(args, st: Settings) -> int:
    ring = _ring(st.ring_data)
    s_lo, s_hi = st.window or (ahss.DEFAULT_WINDOW.s_lo, ahss.DEFAULT_WINDOW.s_hi)
    if s_lo > s_hi or s_hi > 0:
        raise CliError("bad-argument", f"--window {s_lo},{s_hi}: need A <= B <= 0")
    t_lo, t_hi = args.t
    view = ahss.Window(s_lo, s_hi, t_lo, t_hi)
    if not 2 <= args.page <= 8:
        raise CliError("bad-argument", f"--page must lie in 2..8, got {args.page}")
    run = ahss.run_ahss(ring, view=view, last=args.page)
    rows = ahss.survivors(run, view, args.page)
    write_output(ahss.survivor_tsv(rows) if st.format == "tsv" else ahss.render_svg(rows, view), st.out)
    return 0


# ------------------------------------------------------------------ mi-verify


def cmd_mi_verify(args, st: Settings) -> int:
    if st.format != "tsv":
        raise CliError("bad-argument", "mi-verify writes tsv only")
    ring = _ring(st.ring_data) if st.ring_data else None
    if st.scripts and not Path(st.scripts).is_dir():
        raise CliError("no-scripts", f"{st.scripts}: not a directory")
    try:
        ctx = verifier.load_context(ring, pins_path=st.pins)
        reports = verifier.verify_all(ctx, st.scripts, extend_to=args.extend_to)
    except verifier.ScriptError as e:
        raise CliError("bad-script", str(e)) from None
    text = verifier.TSV_HEADER + "\n" + "".join(r.tsv() + "\n" for r in reports)
    write_output(text, st.out)
    return 0 if reports and all(r.ok for r in reports) else 1


# ------------------------------------------------------------------ parser


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise CliError("usage", message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="TOML file; flags override its values")
    common.add_argument("--format", choices=None, help="tsv (default) or svg")
    common.add_argument("--out", help="output path (written atomically); default stdout")

    p = _Parser(prog="tmfmi", description="Ext charts, Tate AHSS and Mahowald invariant checks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("ext", parents=[common], help="Ext chart of a module over A(n)")
    e.add_argument("module", help="module file or fixture name (%s)" % ", ".join(fixture_names()))
    e.add_argument("--bounds", help="S,T: homological degree and internal degree limits")
    e.add_argument("--pins", help="pin file naming classes")
    e.set_defaults(func=cmd_ext)

    k = sub.add_parser("koszul", parents=[common], help="Koszul E1 page")
    k.add_argument("module")
    k.add_argument("--bounds")
    k.set_defaults(func=cmd_koszul)

    s = sub.add_parser("stunted", parents=[common], help="write a stunted projective module")
    s.add_argument("bottom", type=int)
    s.add_argument("top", type=int)
    s.add_argument("--profile", type=int, default=1)
    s.add_argument("--shift", type=int, default=0)
    s.set_defaults(func=cmd_stunted)

    m = sub.add_parser("mi-alg", parents=[common], help="algebraic Mahowald invariants")
    m.add_argument("classes", nargs="+")
    m.add_argument("--profile", type=int, default=2, help="compute over A(n) from Ext over A(n-1)")
    m.add_argument("--n-max", type=int, default=24)
    m.set_defaults(func=cmd_mi_alg)

    a = sub.add_parser("ahss", parents=[common], help="Tate AHSS survivors")
    a.add_argument("--ring-data")
    a.add_argument("--window", help="A,B: cell range s in [A, B]")
    a.add_argument("--t", type=lambda x: _pair(x, "--t"), default=(0, 7), help="T0,T1: degree range")
    a.add_argument("--page", type=int, default=8)
    a.set_defaults(func=cmd_ahss)

    v = sub.add_parser("mi-verify", parents=[common], help="check derivation scripts")
    v.add_argument("--scripts")
    v.add_argument("--ring-data")
    v.add_argument("--pins")
    v.add_argument("--extend-to", type=int, default=64)
    v.set_defaults(func=cmd_mi_verify)
    return p


PAIR_FLAGS = ("--bounds", "--window", "--t")


def _glue_pairs(argv: list[str]) -> list[str]:
    # "--window -7,0" would otherwise read -7,0 as an option
    out: list[str] = []
    it = iter(argv)
    for a in it:
        if a in PAIR_FLAGS:
            nxt = next(it, None)
            out.append(a if nxt is None else f"{a}={nxt}")
        else:
            out.append(a)
    return out


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(_glue_pairs(argv))
        return args.func(args, settings(args))
    except CliError as e:
        print(e.line(), file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: io: {e.filename}: {e.strerror}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
