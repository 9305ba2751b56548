"""Command line front end.

    hillgraph hill      --window -1 100 --potential kind=cosine --potential amplitude=10
    hillgraph graphene  --potential-file run.ini --surface 64 --surface-out cones.csv
    hillgraph tube      --p 0 4
    hillgraph state     --kind three-leaf --index 0 --sign +
    hillgraph selfcheck

A run file is INI with a [potential] section (kind, amplitude, harmonics,
coefficients, breakpoints, values, samples) and an optional [run] section
(window, tol, format, out, surface, surface_out, bands, p).  Flags override
the file.  Exit codes: 0 success, 2 configuration error, 3 numerical or
verification failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import eigenstates, graphene, hill, nanotube
from .errors import ConfigError, ConstructionError, DomainError, HillGraphError, NumericError, UnavailableError
from .potential import Potential

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def fmt(x) -> str:
    return f"{float(x):.15g}"


def _num(x):
    return float(fmt(x)) if x is not None else None


# ---------------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    command: str
    potential: Potential
    window: tuple[float, float]
    tol: float = hill.DEFAULT_TOL
    format: str = "text"
    out: str | None = None
    surface: int | None = None
    surface_out: str | None = None
    bands: tuple[int, ...] | None = None
    p: tuple[int, int] | None = None
    state_kind: str = "hexagon"
    index: int = 0
    sign: str | None = None
    N: int | None = None
    extra: dict = field(default_factory=dict)


def _read_file(path: str) -> tuple[dict, dict]:
    cp = configparser.ConfigParser()
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"bad run file {path}: {exc}") from exc
    pot = dict(cp["potential"]) if cp.has_section("potential") else {}
    run = dict(cp["run"]) if cp.has_section("run") else {}
    return pot, run


def _pair(text, name, conv=float):
    parts = str(text).replace(",", " ").split() if isinstance(text, str) else list(text)
    if len(parts) != 2:
        raise ConfigError(f"{name} needs two values")
    try:
        return tuple(conv(v) for v in parts)
    except ValueError as exc:
        raise ConfigError(f"bad {name}: {exc}") from exc


def _int_list(text) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in str(text).replace(",", " ").split())
    except ValueError as exc:
        raise ConfigError(f"bad band list: {exc}") from exc


def build_config(args: argparse.Namespace) -> RunConfig:
    pot, run = _read_file(args.potential_file) if args.potential_file else ({}, {})
    for item in args.potential or []:
        if "=" not in item:
            raise ConfigError(f"--potential expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        pot[k.strip()] = v.strip()
    pot.setdefault("kind", "zero")
    potential = Potential.from_dict(pot)
    try:
        potential.require_even()
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc

    def pick(flag, key, conv=lambda v: v):
        if flag is not None:
            return flag
        if key in run:
            try:
                return conv(run[key])
            except ValueError as exc:
                raise ConfigError(f"bad {key}: {exc}") from exc
        return None

    window = pick(args.window and tuple(args.window), "window", lambda v: _pair(v, "window"))
    if window is None:
        window = (potential.min_value - 1.0, 100.0)
    lo, hi = window
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise ConfigError(f"empty lambda window [{lo}, {hi}]")
    tol = pick(args.tol, "tol", float)
    tol = hill.DEFAULT_TOL if tol is None else tol
    if not 0.0 < tol < 1e-2:
        raise ConfigError("tol must lie in (0, 1e-2)")
    fmt_ = pick(args.format, "format") or "text"
    if fmt_ not in ("text", "csv", "json"):
        raise ConfigError(f"unknown format {fmt_!r}")
    surface = pick(getattr(args, "surface", None), "surface", int)
    if surface is not None and surface < 2:
        raise ConfigError("surface grid size must be at least 2")
    bands = pick(getattr(args, "bands", None) and _int_list(args.bands), "bands", _int_list)
    p = pick(getattr(args, "p", None) and tuple(args.p), "p", lambda v: _pair(v, "p", int))
    cfg = RunConfig(
        command=args.command,
        potential=potential,
        window=(float(lo), float(hi)),
        tol=float(tol),
        format=fmt_,
        out=pick(args.out, "out"),
        surface=surface,
        surface_out=pick(getattr(args, "surface_out", None), "surface_out"),
        bands=bands,
        p=p,
    )
    if args.command == "state":
        cfg.state_kind = args.kind
        cfg.index = args.index
        cfg.sign = args.sign
        cfg.N = args.N
    return cfg


# ---------------------------------------------------------------------------
# reports


@dataclass
class Report:
    """Metadata plus a flat list of records (section, index, label, lower, upper)."""

    command: str
    meta: dict
    records: list = field(default_factory=list)
    lines: list = field(default_factory=list)

    def add(self, section, index, label, lower, upper=None):
        self.records.append((section, index, label, lower, lower if upper is None else upper))

    def to_json(self) -> str:
        doc = {
            "command": self.command,
            **{k: _jsonable(v) for k, v in self.meta.items()},
            "records": [
                {"section": s, "index": i, "label": l, "lower": _num(a), "upper": _num(b)}
                for s, i, l, a, b in self.records
            ],
        }
        return json.dumps(doc, indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["section", "index", "label", "lower", "upper"])
        for s, i, l, a, b in self.records:
            w.writerow([s, i, l, fmt(a), fmt(b)])
        return buf.getvalue()

    def to_text(self) -> str:
        return "\n".join(self.lines) + "\n"

    def render(self, kind: str) -> str:
        return {"json": self.to_json, "csv": self.to_csv, "text": self.to_text}[kind]()


def _jsonable(v):
    if isinstance(v, float):
        return _num(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.floating):
        return _num(v)
    return v


def _band_label(b: hill.Band) -> str:
    if b.clipped_lower and b.clipped_upper:
        return "clipped"
    if b.clipped_lower:
        return "clipped-lower"
    if b.clipped_upper:
        return "clipped-upper"
    return "full"


def _interval(lo, hi, closed=True) -> str:
    return f"[{fmt(lo)}, {fmt(hi)}]" if closed else f"({fmt(lo)}, {fmt(hi)})"


def _hill_records(rep: Report, bs: hill.BandStructure):
    rep.lines.append(f"bands ({len(bs.bands)}):")
    for b in bs.bands:
        rep.add("band", b.index, _band_label(b), b.lower, b.upper)
        note = "" if not b.clipped else f"  window-clipped ({_band_label(b)})"
        rep.lines.append(f"  B{b.index} = {_interval(b.lower, b.upper)}{note}")
    rep.lines.append("gaps:")
    for g in bs.gaps:
        label = "closed" if g.closed else ("clipped" if g.clipped_lower or g.clipped_upper else "open")
        rep.add("gap", g.index, label, g.lower, g.upper)
        if g.closed:
            rep.lines.append(f"  G{g.index} closed at {fmt(g.lower)}")
        else:
            rep.lines.append(f"  G{g.index} = {_interval(g.lower, g.upper, closed=False)}  ({label})")
    for name, vals in (
        ("dirichlet", bs.dirichlet_eigenvalues),
        ("periodic", bs.periodic_eigenvalues),
        ("antiperiodic", bs.antiperiodic_eigenvalues),
    ):
        for k, v in enumerate(vals):
            rep.add(name, k, {"dirichlet": "flat branch", "periodic": "D=+2", "antiperiodic": "D=-2"}[name], v)
        rep.lines.append(f"{name} eigenvalues: " + (", ".join(fmt(v) for v in vals) or "none"))


def _meta(cfg: RunConfig) -> dict:
    return {"potential": cfg.potential.to_dict(), "window": list(cfg.window), "tol": cfg.tol}


def cmd_hill(cfg: RunConfig) -> Report:
    bs = hill.band_structure(cfg.potential, cfg.window, cfg.tol)
    rep = Report("hill", _meta(cfg))
    rep.lines.append(f"Hill operator, q0 = {cfg.potential.describe()}, window {_interval(*cfg.window)}")
    _hill_records(rep, bs)
    return rep


def cmd_graphene(cfg: RunConfig) -> Report:
    gs = graphene.graphene_spectrum(cfg.potential, cfg.window, cfg.tol)
    bs = gs.band_structure
    rep = Report("graphene", _meta(cfg))
    rep.lines.append(f"graphene, q0 = {cfg.potential.describe()}, window {_interval(*cfg.window)}")
    rep.lines.append("absolutely continuous spectrum (Hill bands):")
    for b in gs.ac_bands:
        rep.add("ac", b.index, _band_label(b), b.lower, b.upper)
        rep.lines.append(f"  {_interval(b.lower, b.upper)}" + ("" if not b.clipped else "  window-clipped"))
    for k, v in enumerate(gs.point_spectrum):
        rep.add("point", k, "flat branch", v)
    rep.lines.append(
        "point spectrum: " + (", ".join(f"{fmt(v)} (flat branch)" for v in gs.point_spectrum) or "none")
    )
    for k, v in enumerate(gs.dirac_levels):
        rep.add("dirac", k, "D=0", v)
    rep.lines.append("Dirac levels: " + (", ".join(fmt(v) for v in gs.dirac_levels) or "none"))
    if cfg.surface:
        surf = graphene.dispersion_surface(bs, cfg.surface, cfg.bands)
        path = cfg.surface_out or "dispersion_surface.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["theta1", "theta2", "band", "sign", "lambda"])
            for t1, t2, k, s, lam in surf.rows():
                w.writerow([fmt(t1), fmt(t2), k, s, fmt(lam)])
        rep.meta["surface"] = {"path": path, "n": cfg.surface, "bands": list(surf.bands), "rows": len(surf)}
        rep.lines.append(f"dispersion surface: {len(surf)} rows written to {path}")
    elif cfg.bands is not None:
        raise ConfigError("--bands only applies together with --surface")
    return rep


def cmd_tube(cfg: RunConfig) -> Report:
    if cfg.p is None:
        raise ConfigError("tube needs --p P1 P2")
    try:
        tv = nanotube.classify(*cfg.p)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    details = nanotube.alpha_details(tv)
    ts = nanotube.tube_spectrum(tv, cfg.potential, cfg.window, cfg.tol)
    rep = Report("tube", _meta(cfg))
    rep.meta.update(
        p=list(tv.vector),
        family=tv.family,
        normal_form=list(tv.normal_form),
        metallic=tv.metallic,
        alpha=ts.alpha,
        alpha_method=details.method,
        alpha_minimized=details.minimized,
    )
    rep.lines.append(
        f"tube p = {tv.vector}: {tv.family}, normal form {tv.normal_form}, "
        f"{'metallic' if tv.metallic else 'semiconducting'}"
    )
    rep.lines.append(f"alpha = {fmt(ts.alpha)} ({details.method}; line minimum {fmt(details.minimized)})")
    rep.lines.append("absolutely continuous spectrum:")
    for k, iv in enumerate(ts.ac_bands):
        rep.add("ac", iv.band, "band", iv.lower, iv.upper)
        rep.lines.append(f"  {_interval(iv.lower, iv.upper)}  (Hill band {iv.band})")
    rep.lines.append("tube gaps: " + (", ".join(_interval(g.lower, g.upper, False) for g in ts.tube_gaps) or "none"))
    for g in ts.tube_gaps:
        rep.add("tube_gap", g.band, "open", g.lower, g.upper)
    for k, v in enumerate(ts.point_spectrum_dirichlet):
        rep.add("dirichlet", k, "flat branch", v)
    rep.lines.append("Dirichlet eigenvalues: " + (", ".join(fmt(v) for v in ts.point_spectrum_dirichlet) or "none"))
    for k, x in enumerate(ts.point_spectrum_xi):
        rep.add("xi", x.band, f"{x.sign} {x.location}", x.lam)
    rep.lines.append(
        "Xi levels: " + (", ".join(f"{fmt(x.lam)} ({x.location})" for x in ts.point_spectrum_xi) or "none")
    )
    return rep


STATE_KINDS = ("hexagon", "tube-loop", "bead", "dumbbell", "three-leaf")


def cmd_state(cfg: RunConfig) -> tuple[Report, str]:
    p = cfg.potential
    rep = Report("state", _meta(cfg))
    if cfg.state_kind == "three-leaf":
        if cfg.p is not None:
            tv = nanotube.classify(*cfg.p)
            if not tv.even_zigzag:
                raise ConfigError(f"Xi states require even zig-zag tubes; {tv.vector} is {tv.family}")
        bs = hill.band_structure(p, cfg.window, cfg.tol)
        levels = nanotube.xi_levels(bs)
        if cfg.sign is not None:
            levels = [x for x in levels if x[2] == cfg.sign]
        if not 0 <= cfg.index < len(levels):
            raise ConfigError(f"Xi index {cfg.index} out of range ({len(levels)} levels in the window)")
        lam, _, sign = levels[cfg.index]
        state = eigenstates.build_three_leaf(p, lam, sign)
        target = state if cfg.p is None else state.extension(nanotube.classify(*cfg.p).normal_form[1])
        rep.meta.update(kind="three-leaf", lam=lam, sign=sign)
    else:
        dirs = hill.dirichlet_spectrum(p, cfg.window, cfg.tol)
        if not 0 <= cfg.index < len(dirs):
            raise ConfigError(f"Dirichlet index {cfg.index} out of range ({len(dirs)} eigenvalues in the window)")
        lam = dirs[cfg.index]
        if cfg.state_kind == "hexagon":
            state = eigenstates.build_hexagon_loop(p, lam)
        elif cfg.state_kind == "tube-loop":
            N = cfg.N or (nanotube.classify(*cfg.p).normal_form[1] if cfg.p else None)
            if not N:
                raise ConfigError("tube-loop needs --N or a zig-zag --p")
            state = eigenstates.build_tube_loop(p, lam, N)
        else:
            state = eigenstates.build_dumbbell(p, lam, full=cfg.state_kind == "dumbbell")
        target = state
        rep.meta.update(kind=cfg.state_kind, lam=lam, parity=state.parity)
    report = eigenstates.verify_state(target)
    rep.meta.update(
        vertex_residual=float(report.vertex_residual),
        flux_residual=float(report.flux_residual),
        eigen_residual=float(report.eigen_residual),
        passed=bool(report.passed),
    )
    for name in ("vertex_residual", "flux_residual", "eigen_residual"):
        rep.add("residual", 0, name, getattr(report, name))
    rep.lines.append(f"{rep.meta['kind']} state at lambda = {fmt(lam)}")
    rep.lines.append(
        f"residuals: vertex {report.vertex_residual:.3e}, flux {report.flux_residual:.3e}, "
        f"eigen {report.eigen_residual:.3e} -> {'pass' if report.passed else 'FAIL'} (tol {report.tol:g})"
    )
    edges = target.edges
    return rep, eigenstates.state_csv(edges)


def selfcheck() -> list[tuple[str, bool, str]]:
    """Free-case oracle suite: closed forms for q0 = 0."""
    z = Potential.zero()
    out = []
    lam = np.linspace(0.01, 400.0, 500)
    err = float(np.max(np.abs(hill.discriminant(z, lam) - 2.0 * np.cos(np.sqrt(lam)))))
    out.append(("discriminant equals 2 cos sqrt(lambda)", err < 1e-9, f"max error {err:.2e}"))
    d = hill.dirichlet_spectrum(z, (0.0, 100.0))
    ref = [(k * math.pi) ** 2 for k in (1, 2, 3)]
    ok = len(d) == 3 and max(abs(a - b) for a, b in zip(d, ref)) < 1e-9
    out.append(("Dirichlet eigenvalues are (k pi)^2", ok, ", ".join(fmt(v) for v in d)))
    bs = hill.band_structure(z, (-1.0, 100.0))
    ok = all(g.closed for g in bs.gaps) and abs(bs.bands[0].lower) < 1e-9
    out.append(("all gaps closed, spectrum starts at 0", ok, f"{len(bs.gaps)} gaps"))
    gs = graphene.spectrum_from_bands(bs)
    ref = [((2 * k + 1) * math.pi / 2) ** 2 for k in range(3)]
    ok = len(gs.dirac_levels) == 3 and max(abs(a - b) for a, b in zip(gs.dirac_levels, ref)) < 1e-9
    out.append(("Dirac levels are ((2k+1) pi / 2)^2", ok, ", ".join(fmt(v) for v in gs.dirac_levels)))
    xi = [x[0] for x in nanotube.xi_levels(bs)][:2]
    ref = [math.acos(1 / 3) ** 2, math.acos(-1 / 3) ** 2]
    ok = max(abs(a - b) for a, b in zip(xi, ref)) < 1e-9
    out.append(("Xi levels in band 0 are arccos(+-1/3)^2", ok, ", ".join(fmt(v) for v in xi)))
    r = eigenstates.verify_state(eigenstates.build_three_leaf(z, xi[0], +1), 1e-8)
    out.append(("three-leaf state verifies", r.passed, f"flux {r.flux_residual:.1e}"))
    r = eigenstates.verify_state(eigenstates.build_hexagon_loop(z, math.pi**2), 1e-8)
    out.append(("hexagon loop state verifies", r.passed, f"flux {r.flux_residual:.1e}"))
    return out


# ---------------------------------------------------------------------------
# argument parsing


def _common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--potential-file", help="INI run file with [potential] and [run] sections")
    sp.add_argument("--potential", action="append", metavar="KEY=VALUE", help="potential parameter, e.g. kind=cosine")
    sp.add_argument("--window", nargs=2, type=float, metavar=("LO", "HI"), help="lambda window")
    sp.add_argument("--tol", type=float, help="integration tolerance (default 1e-10)")
    sp.add_argument("--format", choices=("text", "csv", "json"), help="report format (default text)")
    sp.add_argument("--out", help="write the report (or state samples) here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hillgraph", description="Spectra of periodic quantum graphs: graphene and nanotubes.")
    sub = ap.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("hill", help="bands, gaps and eigenvalues of the Hill operator")
    _common(sp)
    sp = sub.add_parser("graphene", help="graphene spectrum and dispersion surface")
    _common(sp)
    sp.add_argument("--surface", type=int, metavar="N", help="tabulate the dispersion on an N x N grid")
    sp.add_argument("--surface-out", metavar="PATH", help="CSV file for the surface")
    sp.add_argument("--bands", help="comma separated band indices for the surface")
    sp = sub.add_parser("tube", help="nanotube spectrum")
    _common(sp)
    sp.add_argument("--p", nargs=2, type=int, metavar=("P1", "P2"), help="tube vector")
    sp = sub.add_parser("state", help="build and verify a compactly supported eigenstate")
    _common(sp)
    sp.add_argument("--kind", choices=STATE_KINDS, default="hexagon")
    sp.add_argument("--index", type=int, default=0, help="index into the Dirichlet or Xi levels in the window")
    sp.add_argument("--sign", choices=("+", "-"), help="three-leaf level: D = +2/3 or D = -2/3")
    sp.add_argument("--N", type=int, help="tube circumference for tube-loop states")
    sp.add_argument("--p", nargs=2, type=int, metavar=("P1", "P2"), help="tube vector (three-leaf extension)")
    sub.add_parser("selfcheck", help="free-case oracle checks")
    return ap


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        if args.command == "selfcheck":
            results = selfcheck()
            for name, ok, detail in results:
                print(f"{'PASS' if ok else 'FAIL'}  {name}  ({detail})")
            return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_NUMERIC
        cfg = build_config(args)
        if cfg.command == "state":
            rep, samples = cmd_state(cfg)
            if cfg.out:
                _emit(samples, cfg.out)
                sys.stdout.write(rep.render(cfg.format))
            else:
                sys.stdout.write(rep.render(cfg.format))
            return EXIT_OK if rep.meta["passed"] else EXIT_NUMERIC
        rep = {"hill": cmd_hill, "graphene": cmd_graphene, "tube": cmd_tube}[cfg.command](cfg)
        _emit(rep.render(cfg.format), cfg.out)
        if cfg.out and cfg.format != "text":
            sys.stdout.write(rep.to_text())
        return EXIT_OK
    except (ConfigError, DomainError, UnavailableError) as exc:
        print(f"hillgraph: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericError, ConstructionError) as exc:
        print(f"hillgraph: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except HillGraphError as exc:  # pragma: no cover
        print(f"hillgraph: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
