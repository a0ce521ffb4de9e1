"""Command-line front end: configuration parsing, dispatch and artifacts.

Usage::

    mrtlb converge example=example1 eps=0.1
    mrtlb params --sweep eps=0.001:0.16:0.001 --s5 1
    mrtlb equiv --example 1 --steps 200
    mrtlb stability-scan --box default --res 12
    mrtlb tables ids=ex1_lb,ex1_flfd
    mrtlb run --config run.cfg dx=0.05

A configuration is ``key = value`` text with optional ``[section]`` headers
and ``#`` comments. A bare first line ``<subcommand> [example] [k=v ...]`` is
accepted as a shorthand. Command-line ``key=value`` (or ``--key value``)
tokens override the file.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io, spectral, verify
from .errors import MRTLBError, ParseError, RangeError, ValidationError
from .params import derive_fourth_order

SUBCOMMANDS = ("run", "converge", "equiv", "stability-scan", "tables", "params")
OUTPUT_ENV = "MRTLB_OUTPUT_ROOT"


def _to_list(text: str) -> list:
    return [t.strip() for t in text.split(",") if t.strip()]


def _to_range(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError("expected start:stop:step")
    return tuple(float(p) for p in parts)


def _to_example(text: str) -> str:
    return f"example{text}" if text.isdigit() else text


# key -> (section, converter, default)
SCHEMA = {
    "example": ("problem", _to_example, "example1"),
    "scheme": ("problem", str, "lb"),
    "eps": ("parameters", float, 0.1),
    "s5": ("parameters", float, None),
    "s1": ("parameters", float, 1.0),
    "s4_shift": ("parameters", float, 0.0),
    "strategy": ("parameters", str, "analytic"),
    "closure": ("parameters", str, "all"),
    "dx": ("discretization", float, 0.1),
    "dt": ("discretization", float, 0.1),
    "t_final": ("discretization", float, 1.0),
    "rungs": ("discretization", int, 4),
    "steps": ("discretization", int, 200),
    "n": ("discretization", int, 40),
    "snapshots": ("discretization", _to_list, []),
    "dir": ("output", str, None),
    "formats": ("output", _to_list, ["csv", "svg"]),
    "seed": ("output", int, 20240101),
    "box": ("scan", str, "default"),
    "res": ("scan", int, 12),
    "samples": ("scan", int, 10_000),
    "ids": ("tables", _to_list, []),
    "sweep": ("params", _to_range, None),
}
SECTIONS = sorted({v[0] for v in SCHEMA.values()})


@dataclass
class RunConfig:
    """Validated run configuration.

    Attributes:
        subcommand: One of :data:`SUBCOMMANDS`.
        values: Resolved value per schema key (defaults applied).
        explicit: Keys set by the user.
    """

    subcommand: str
    values: dict
    explicit: set = field(default_factory=set)

    def __getitem__(self, key):
        return self.values[key]

    def resolved(self) -> dict:
        """Flat view recorded in artifact headers."""
        out = {"subcommand": self.subcommand}
        for k, v in self.values.items():
            out[k] = ",".join(map(str, v)) if isinstance(v, list) else v
        return out


def _split_kv(token: str, line: int):
    if "=" not in token:
        raise ParseError(f"expected key=value, got {token!r}", line=line)
    k, v = token.split("=", 1)
    k = k.strip()
    if not k:
        raise ParseError("empty key", line=line)
    return k, v.strip().strip('"').strip("'")


def _raw_pairs(text: str):
    """(subcommand or None, [(line, key, raw value)]) from configuration text."""
    sub = None
    pairs = []
    section = None
    first = True
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in SECTIONS:
                raise ParseError(f"unknown section [{section}]", line=no, field=section)
            first = False
            continue
        if first and line.split()[0] in SUBCOMMANDS:
            tokens = line.split()
            sub = tokens[0]
            rest = tokens[1:]
            if rest and "=" not in rest[0]:
                pairs.append((no, "example", rest[0]))
                rest = rest[1:]
            for t in rest:
                pairs.append((no, *_split_kv(t, no)))
            first = False
            continue
        first = False
        k, v = _split_kv(line, no)
        if "." in k:
            sec, k = k.split(".", 1)
        else:
            sec = section
        if k == "subcommand":
            sub = v
            continue
        if k in SCHEMA and sec is not None and SCHEMA[k][0] != sec:
            raise ParseError(f"key {k!r} belongs to [{SCHEMA[k][0]}], not [{sec}]", line=no, field=k)
        pairs.append((no, k, v))
    return sub, pairs


def parse_config(text: str, overrides=(), subcommand: str | None = None) -> RunConfig:
    """Parse and validate configuration text.

    Args:
        text: Configuration text.
        overrides: Extra ``key=value`` strings applied after the text.
        subcommand: Overrides the subcommand named in the text.

    Raises:
        ParseError: Malformed line, unknown key or unconvertible value.
        ValidationError: Semantically invalid values (all violations listed).
    """
    sub, pairs = _raw_pairs(text)
    for tok in overrides:
        pairs.append((None, *_split_kv(tok, None)))
    sub = subcommand or sub
    if sub is None:
        raise ParseError("no subcommand given")
    if sub not in SUBCOMMANDS:
        raise ParseError(f"unknown subcommand {sub!r}", field="subcommand")
    values = {k: v[2] for k, v in SCHEMA.items()}
    explicit = set()
    for line, k, raw in pairs:
        if k not in SCHEMA:
            raise ParseError(f"unknown key {k!r}", line=line, field=k)
        try:
            values[k] = SCHEMA[k][1](raw)
        except ValueError as exc:
            raise ParseError(f"cannot convert {raw!r}: {exc}", line=line, field=k) from None
        explicit.add(k)
    cfg = RunConfig(sub, values, explicit)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    v = cfg.values
    problems = []
    for k, val in v.items():
        if isinstance(val, float) and not math.isfinite(val):
            problems.append(f"{k}={val} is not finite")
    if v["example"] not in verify.EXAMPLES:
        problems.append(f"example {v['example']!r} does not exist")
    if v["scheme"] not in verify.SCHEMES:
        problems.append(f"scheme {v['scheme']!r} does not exist")
    for k in ("dx", "dt", "t_final"):
        if not v[k] > 0:
            problems.append(f"{k} must be positive")
    for k in ("rungs", "steps", "n", "res"):
        if v[k] < 2:
            problems.append(f"{k} must be at least 2")
    if v["strategy"] not in ("analytic", "lb_bootstrap"):
        problems.append(f"strategy {v['strategy']!r} must be analytic or lb_bootstrap")
    if v["closure"] not in ("edges", "reconstruct", "all"):
        problems.append(f"closure {v['closure']!r} is not a known closure")
    if v["box"] not in ("default", "illegal"):
        problems.append(f"box {v['box']!r} must be default or illegal")
    unknown_tables = [t for t in v["ids"] if t not in verify.REFERENCE_TABLES]
    if unknown_tables:
        problems.append(f"unknown table ids {unknown_tables}")
    if v["s5"] is not None or cfg.subcommand in ("equiv", "params"):
        s5 = 1.0 if v["s5"] is None else v["s5"]
        try:
            derive_fourth_order(v["eps"], s5, v["s1"])
        except RangeError as exc:
            problems.append(f"eps={v['eps']}, s5={s5}: {exc}")
    if v["sweep"] is not None:
        a, b, h = v["sweep"]
        if not (h > 0 and b >= a):
            problems.append("sweep needs start <= stop and a positive step")
    out = output_dir(cfg)
    try:
        out.mkdir(parents=True, exist_ok=True)
        if not os.access(out, os.W_OK):
            problems.append(f"output directory {out} is not writable")
    except OSError as exc:
        problems.append(f"output directory {out}: {exc}")
    if problems:
        raise ValidationError(problems)


def output_dir(cfg: RunConfig) -> Path:
    if cfg.values["dir"]:
        return Path(cfg.values["dir"])
    root = Path(os.environ.get(OUTPUT_ENV, "mrtlb-out"))
    return root / cfg.subcommand


# --------------------------------------------------------------------------
# Dispatch
# --------------------------------------------------------------------------
class _Artifacts:
    """Tracks written files so a failed run leaves nothing behind."""

    def __init__(self, root: Path, cfg: RunConfig):
        self.root = root
        self.cfg = cfg
        self.paths: list[Path] = []

    def path(self, name: str) -> Path:
        p = self.root / name
        self.paths.append(p)
        return p

    def wants(self, fmt: str) -> bool:
        return fmt in self.cfg["formats"]

    def remove(self):
        for p in self.paths:
            p.unlink(missing_ok=True)


def _scheme_rset_fn(cfg):
    s5, shift = cfg["s5"], cfg["s4_shift"]
    if s5 is None and shift == 0.0:
        return None
    spec = verify.SCHEMES[cfg["scheme"]]

    def fn(eps, pb, dt):
        base = spec.params(eps, pb, dt) if s5 is None else derive_fourth_order(eps, s5, cfg["s1"])
        return base.with_(s4=base.s4 + shift) if shift else base

    return fn


def _cmd_run(cfg, art, out):
    times = [float(t) for t in cfg["snapshots"]] or [cfg["t_final"]]
    dt = cfg["dt"]
    steps = {round(t / dt): t for t in times}
    snaps = {n: None for n in steps}
    fn = _scheme_rset_fn(cfg)
    kappa = cfg["eps"] * cfg["dx"] ** 2 / dt
    sol = verify.make_example(cfg["example"], kappa)
    rset = fn(cfg["eps"], sol.problem, dt) if fn else None
    res = verify.simulate(cfg["scheme"], cfg["example"], cfg["eps"], cfg["dx"], dt,
                          max(times), rset=rset, strategy=cfg["strategy"], snapshots=snaps,
                          closure=cfg["closure"])
    disc = verify.Discretization.for_problem(sol.problem, cfg["dx"], dt)
    x, y = disc.coordinates(sol.problem)
    hdr = cfg.resolved()
    for n, phi in sorted(snaps.items()):
        if phi is None:
            continue
        tag = f"field_n{n:06d}"
        if art.wants("csv"):
            io.write_field_csv(art.path(tag + ".csv"), x, y, phi, hdr)
        if art.wants("bin"):
            io.write_field_binary(art.path(tag + ".bin"), phi, n, cfg["dx"], dt)
        if art.wants("svg"):
            io.heatmap_svg(art.path(tag + ".svg"), x, y, phi, f"phi at t={n * dt:g}", "phi", hdr)
    out.write(f"rmse at t={res.steps * dt:g}: {res.rmse:.6e}\n")


def _cmd_converge(cfg, art, out):
    rep = verify.convergence_study(cfg["scheme"], cfg["example"], cfg["eps"], cfg["dx"], cfg["dt"],
                                   cfg["t_final"], cfg["rungs"], rset_fn=_scheme_rset_fn(cfg),
                                   strategy=cfg["strategy"], closure=cfg["closure"])
    hdr = cfg.resolved()
    rates = [math.nan] + list(rep.pairwise)
    if art.wants("csv"):
        io.write_csv(art.path("convergence.csv"), ["dx", "dt", "rmse", "cr"],
                     [(dx, dt, r, c) for (dx, dt, r), c in zip(rep.rows(), rates)], hdr)
    if art.wants("svg"):
        io.loglog_svg(art.path("convergence.svg"), {cfg["scheme"]: (rep.dxs, rep.rmses)},
                      f"{cfg['example']}, eps={cfg['eps']}", hdr)
    for (dx, dt, r), c in zip(rep.rows(), rates):
        out.write(f"dx={dx:.6g} dt={dt:.6g} rmse={r:.6e} cr={c:.4f}\n")
    out.write(f"final-pair CR {rep.final_pair:.4f}; endpoint CR {rep.endpoint:.4f}; "
              f"least-squares slope {rep.lsq_slope:.4f}\n")


def _cmd_equiv(cfg, art, out):
    s5 = 1.0 if cfg["s5"] is None else cfg["s5"]
    rep = verify.example1_equivalence(cfg["steps"], s5, n=cfg["n"], epsilon=cfg["eps"])
    bound = 1e-10 if s5 == 1.0 else 1e-9
    if art.wants("csv"):
        io.write_csv(art.path("equivalence.csv"), ["step", "max_abs_dev"],
                     enumerate(rep.deviations, start=1), cfg.resolved())
    rel = "<" if rep.max_deviation < bound else ">="
    out.write(f"max |Δφ| = {rep.max_deviation:.3e} {rel} {bound:.0e}\n")
    return 0 if rep.max_deviation < bound else 1


def _cmd_scan(cfg, art, out):
    axes = list(spectral.closure_axes(cfg["res"]))
    if cfg["box"] == "illegal":
        axes[2] = np.array([1.5, 1.75])
    record = art.wants("csv")
    rep = spectral.stability_scan(*axes, record=record)
    hdr = cfg.resolved()
    if record:
        labels = np.array([v.value for v in spectral.Verdict])
        rows = ((*r[:6], labels[int(r[6])]) for r in rep.rows)
        io.write_csv(art.path("scan.csv"), ["s2", "s4", "w0", "theta1", "theta2", "max_mod", "verdict"],
                     rows, hdr)
    if art.wants("svg"):
        rset = derive_fourth_order(cfg["eps"], 1.0)
        th, mod = spectral.modulus_map(rset, 64)
        io.heatmap_svg(art.path("modulus_map.svg"), th, th, mod,
                       f"max |λ|, eps={cfg['eps']}", "max |λ|", hdr,
                     axes=("theta1", "theta2"))
    signs = {}
    if cfg["samples"] > 0:
        signs = spectral.sample_sign_functions(points=cfg["samples"], seed=cfg["seed"])
    tol = spectral.MARGIN
    if rep.exceed == 0:
        t1, t2 = rep.argmax[3:]
        out.write(f"no instability found; max |λ| = {rep.max_modulus:.12f} "
                  f"(within 1 + {tol:g}) at θ=({t1:.4f}, {t2:.4f})\n")
    else:
        out.write(f"instability found at {rep.exceed} of {rep.points} points; "
                  f"max |λ| = {rep.max_modulus:.6f} at {rep.argmax}\n")
    out.write(f"condition-set disagreements: {rep.n_disagree}; verdicts {rep.verdict_counts}\n")
    for name, s in signs.items():
        out.write(f"{name}: {s.violations} sign violations in {s.samples} samples (seed {cfg['seed']})\n")
    return 0 if (rep.exceed == 0) == (cfg["box"] == "default") else 1


def _cmd_tables(cfg, art, out):
    results = verify.reproduce_tables(cfg["ids"] or None, rungs=cfg["rungs"])
    rows = []
    for r in results:
        for k, (m, p, ok) in enumerate(zip(r.report.rmses, r.ref_rmse, r.rmse_ok)):
            rows.append((r.table_id, r.epsilon, f"rmse{k + 1}", m, p, ok))
        rows.append((r.table_id, r.epsilon, "cr", r.cr, r.ref_cr, r.cr_ok))
        out.write(f"{r.table_id} eps={r.epsilon:g}: {'PASS' if r.passed else 'FAIL'} "
                  f"cr {r.cr:.4f} (reference {r.ref_cr:.4f}) "
                  f"rmse ratios {' '.join(f'{x:.2f}' for x in r.rmse_ratios)}\n")
    if art.wants("csv"):
        io.write_csv(art.path("tables.csv"), ["table", "eps", "cell", "measured", "published", "pass"],
                     rows, cfg.resolved())
    return 0


def _cmd_params(cfg, art, out):
    s5 = 1.0 if cfg["s5"] is None else cfg["s5"]
    if cfg["sweep"] is None:
        rset = derive_fourth_order(cfg["eps"], s5, cfg["s1"])
        for k, v in rset.to_config().items():
            out.write(f"{k} = {v}\n")
        return 0
    a, b, h = cfg["sweep"]
    count = int(math.floor((b - a) / h + 1e-9)) + 1
    rows = []
    for eps in a + h * np.arange(count):
        try:
            r = derive_fourth_order(float(eps), s5, cfg["s1"])
        except RangeError:
            continue
        rows.append((float(eps), r.w0, r.w_side, r.s2, r.s4))
    path = art.path("params_sweep.csv")
    io.write_csv(path, ["eps", "w0", "w1", "s2", "s4"], rows, cfg.resolved())
    out.write(f"{len(rows)} parameter sets written to {path}\n")
    return 0


_HANDLERS = {
    "run": _cmd_run,
    "converge": _cmd_converge,
    "equiv": _cmd_equiv,
    "stability-scan": _cmd_scan,
    "tables": _cmd_tables,
    "params": _cmd_params,
}


def dispatch(cfg: RunConfig, out=None) -> int:
    """Run one subcommand; removes its partial artifacts on failure."""
    out = out or sys.stdout
    root = output_dir(cfg)
    root.mkdir(parents=True, exist_ok=True)
    art = _Artifacts(root, cfg)
    try:
        status = _HANDLERS[cfg.subcommand](cfg, art, out)
    except Exception:
        art.remove()
        raise
    return 0 if status is None else status


def _normalize(tokens):
    """Turn ``--key value`` / ``--key=value`` tokens into ``key=value``."""
    out = []
    it = iter(tokens)
    for tok in it:
        if tok.startswith("--"):
            key = tok[2:].replace("-", "_")
            if "=" in key and key.split("=", 1)[0] not in SCHEMA:
                out.append(key)
                continue
            if "=" in key:
                out.append(key)
                continue
            val = next(it, None)
            if val is None:
                raise ParseError(f"flag --{key} needs a value", field=key)
            if key in ("sweep",) and "=" in val:
                val = val.split("=", 1)[1]
            out.append(f"{key}={val}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="mrtlb", description=__doc__.splitlines()[0])
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", type=Path, help="configuration file")
    args, rest = parser.parse_known_args(argv)
    try:
        text = args.config.read_text() if args.config else ""
        cfg = parse_config(text, _normalize(rest), subcommand=args.subcommand)
        return dispatch(cfg)
    except (MRTLBError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
