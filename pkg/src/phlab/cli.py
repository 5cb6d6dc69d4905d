"""Command-line front end.

Every run reads one JSON config document (``-c FILE``; ``-`` for stdin), applies
flag overrides, runs one subcommand and writes ``NAME.*`` files plus a
``NAME.manifest.json`` into the output directory (``--out``, else the
``PHLAB_OUT`` environment variable, else the current directory).  A rerun with
an unchanged config and intact outputs is a no-op.

Complex numbers are written ``{"re": x, "im": y}`` everywhere.

Exit codes: 0 ok, 2 configuration error, 3 numerical failure, 4 class condition.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import attracting_bisectors, riccati_decay, series_third, series_zero
from .backlund import (ClosedForm, IdenticallySingular, IntegratedSolution, chain, eq1_residual,
                       map_params, parse_chain, probe_points)
from .core import Params, PhlabError, State, ThirdRoot
from .integrator import PathSpec, Tolerances, integrate
from .laurent import pole_to_dict
from .rescale import cluster_estimate, convergence_diagnostic, write_cluster_csv
from .riccati import (ClassConditionViolated, ExceptionalParameters, FirstKindSolution,
                      SecondKindSolution, make_first_kind, make_second_kind, second_kind_residuals)
from .survey import PoleDB, census, scan, track_strings

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_CLASS = 0, 2, 3, 4


class ConfigError(Exception):
    pass


# -- config helpers ------------------------------------------------------------

def cx_in(v, where="value") -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, dict) and set(v) <= {"re", "im"}:
        try:
            return complex(float(v.get("re", 0.0)), float(v.get("im", 0.0)))
        except (TypeError, ValueError):
            pass
    raise ConfigError(f"{where}: expected a number or {{\"re\": x, \"im\": y}}, got {v!r}")


def cx_out(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def get(cfg: dict, key: str, default=None, required=False):
    cur = cfg
    for part in key.split("."):
        if not isinstance(cur, dict) or part not in cur:
            if required:
                raise ConfigError(f"missing required field {key!r}")
            return default
        cur = cur[part]
    return cur


def set_path(cfg: dict, key: str, value):
    parts = key.split(".")
    cur = cfg
    for part in parts[:-1]:
        cur = cur.setdefault(part, {})
        if not isinstance(cur, dict):
            raise ConfigError(f"cannot set {key!r}: {part!r} is not an object")
    cur[parts[-1]] = value


def load_config(path: str) -> dict:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    try:
        cfg = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}:1: the config must be a JSON object")
    return cfg


def parse_params(cfg) -> Params:
    block = get(cfg, "params", {})
    return Params(cx_in(block.get("alpha", 0), "params.alpha"), cx_in(block.get("beta", 0), "params.beta"))


def parse_root(tag, where) -> ThirdRoot:
    try:
        return ThirdRoot.from_tag(str(tag))
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def parse_tol(cfg) -> Tolerances:
    block = get(cfg, "tolerances", {}) or {}
    try:
        return Tolerances(**{k: float(v) for k, v in block.items()})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"tolerances: {exc}") from None


CLOSED_FORMS = {
    "zero": ((0, 0), lambda z: (0 * z, 0 * z), "p = q = 0"),
    "inverse": ((-1, 1), lambda z: (1 / z, -1 / z), "p = 1/z, q = -1/z"),
    "polynomial": ((1, -1), lambda z: (-z, -z), "p = q = -z"),
}


def build_solution(cfg):
    """The oracle described by ``solution`` (and ``chain``) in the config."""
    sol_cfg = get(cfg, "solution", {"kind": "seed"})
    kind = sol_cfg.get("kind", "seed")
    if kind == "seed":
        params = parse_params(cfg)
        init = State(cx_in(sol_cfg.get("z0", 0), "solution.z0"), cx_in(sol_cfg.get("p0", 0), "solution.p0"),
                     cx_in(sol_cfg.get("q0", 0), "solution.q0"))
        sol = IntegratedSolution(init, params, parse_tol(cfg), description="seed")
    elif kind == "closed":
        name = sol_cfg.get("name", "zero")
        if name not in CLOSED_FORMS:
            raise ConfigError(f"solution.name: unknown closed form {name!r}; one of {sorted(CLOSED_FORMS)}")
        (a, b), fn, desc = CLOSED_FORMS[name]
        sol = ClosedForm(fn, Params(a, b), desc)
    elif kind == "first":
        rho = parse_root(sol_cfg.get("rho", "1"), "solution.rho")
        seed = sol_cfg.get("seed", [0, 0])
        sol = make_first_kind(rho, cx_in(sol_cfg.get("alpha", 0), "solution.alpha"),
                              (cx_in(seed[0], "solution.seed"), cx_in(seed[1], "solution.seed")))
    elif kind == "second":
        rho = parse_root(sol_cfg.get("rho", "w"), "solution.rho")
        seed = sol_cfg.get("seed", [0, 0])
        sol = make_second_kind(cx_in(sol_cfg.get("beta", 0), "solution.beta"), rho,
                               (cx_in(seed[0], "solution.seed"), cx_in(seed[1], "solution.seed")))
    else:
        raise ConfigError(f"solution.kind: unknown kind {kind!r}; one of seed, closed, first, second")
    return sol


def apply_chain(cfg, sol):
    text = get(cfg, "chain", "") or ""
    if not text:
        return sol, []
    try:
        steps = parse_chain(text)
    except ValueError as exc:
        raise ConfigError(f"chain: {exc}") from None
    return chain(steps, sol), steps


def parse_path(cfg) -> PathSpec:
    block = get(cfg, "path", required=True)
    kind = block.get("kind", "segment")
    try:
        if kind == "segment":
            return PathSpec.segment(cx_in(block["a"], "path.a"), cx_in(block["b"], "path.b"))
        if kind == "polyline":
            return PathSpec.polyline([cx_in(v, "path.vertices") for v in block["vertices"]])
        if kind == "circle":
            return PathSpec.circle(cx_in(block.get("center", 0), "path.center"), float(block["radius"]),
                                   float(block.get("theta0", 0.0)), float(block.get("sweep", 2 * math.pi)))
        if kind == "ray":
            return PathSpec.ray(float(block["angle"]), float(block["r0"]), float(block["r1"]))
    except KeyError as exc:
        raise ConfigError(f"path: missing field {exc.args[0]!r}") from None
    except ValueError as exc:
        raise ConfigError(f"path: {exc}") from None
    raise ConfigError(f"path.kind: unknown kind {kind!r}")


# -- output bookkeeping --------------------------------------------------------

class Run:
    """Collects outputs in memory, then writes them and the manifest."""

    def __init__(self, out_dir: Path, name: str, command: str, cfg: dict):
        self.out_dir, self.name, self.command = out_dir, name, command
        self.cfg = cfg
        self.files: dict[str, str] = {}
        self.summary: dict = {}

    @property
    def config_hash(self) -> str:
        text = json.dumps({"command": self.command, "config": self.cfg}, sort_keys=True)
        return hashlib.sha256(text.encode()).hexdigest()

    def manifest_path(self) -> Path:
        return self.out_dir / f"{self.name}.manifest.json"

    def up_to_date(self) -> bool:
        mp = self.manifest_path()
        if not mp.exists():
            return False
        try:
            man = json.loads(mp.read_text())
        except json.JSONDecodeError:
            return False
        if man.get("config_hash") != self.config_hash or man.get("status") != "complete":
            return False
        for fname, digest in man.get("outputs", {}).items():
            f = self.out_dir / fname
            if not f.exists() or hashlib.sha256(f.read_bytes()).hexdigest() != digest:
                return False
        return True

    def previous(self) -> dict | None:
        mp = self.manifest_path()
        if not mp.exists():
            return None
        try:
            return json.loads(mp.read_text())
        except json.JSONDecodeError:
            return None

    def add(self, suffix: str, text: str):
        self.files[f"{self.name}.{suffix}"] = text

    def commit(self, extra: dict | None = None):
        self.out_dir.mkdir(parents=True, exist_ok=True)
        digests = {}
        for fname, text in sorted(self.files.items()):
            (self.out_dir / fname).write_text(text)
            digests[fname] = hashlib.sha256(text.encode()).hexdigest()
        man = {"command": self.command, "name": self.name, "version": __version__,
               "config_hash": self.config_hash, "config": self.cfg, "outputs": digests,
               "summary": self.summary, "status": "complete"}
        if extra:
            man.update(extra)
        self.manifest_path().write_text(json.dumps(man, sort_keys=True, indent=1) + "\n")


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def fmt(x) -> str:
    return repr(float(x))


def poles_text(records) -> str:
    return "".join(json.dumps(pole_to_dict(r), sort_keys=True) + "\n" for r in records)


def census_text(rep) -> str:
    return csv_text(["r[z]", "n_total[count]", "n_1[count]", "n_w[count]", "n_wbar[count]"],
                    [[fmt(r), *c] for r, c in zip(rep.radii, rep.counts)])


# -- commands ------------------------------------------------------------------

def _scan_cfg(cfg):
    reg = get(cfg, "region", {}) or {}
    try:
        r0, r1 = float(reg.get("r0", 1.0)), float(reg.get("r1", 10.0))
        density = float(get(cfg, "density", 1.0))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"region: {exc}") from None
    if not (1.0 <= r0 < r1):
        raise ConfigError("region: need 1 <= r0 < r1")
    return r0, r1, density


def _resumable_scan(run: Run, sol, cfg, jobs):
    """Scan the configured annulus, reusing annuli completed by an earlier run of
    the same solution (region bookkeeping in the manifest)."""
    r0, r1, density = _scan_cfg(cfg)
    prev = run.previous()
    key = json.dumps({k: cfg.get(k) for k in ("params", "solution", "chain", "density", "tolerances")},
                     sort_keys=True)
    done, records = [], []
    pfile = run.out_dir / f"{run.name}.poles.jsonl"
    if prev and prev.get("solution_key") == key and pfile.exists():
        done = [tuple(a) for a in prev.get("completed", [])]
        records = PoleDB.load_jsonl(pfile).records
    todo = []
    lo = r0
    for a, b in sorted(done):
        if b <= lo or a >= r1:
            continue
        if a > lo:
            todo.append((lo, min(a, r1)))
        lo = max(lo, b)
    if lo < r1:
        todo.append((lo, r1))
    db = PoleDB(region=(min([r0] + [a for a, _ in done]), max([r1] + [b for _, b in done])))
    for rec in records:
        db.add(rec)
    for a, b in todo:
        part = scan(sol, a, b, density=density, jobs=jobs)
        for rec in part.records:
            db.add(rec)
        db.diagnostics.setdefault("count_mismatch", []).extend(part.diagnostics.get("count_mismatch", []))
    db.canonical()
    merged = sorted(done + todo)
    spans = []
    for a, b in merged:
        if spans and a <= spans[-1][1] + 1e-12:
            spans[-1] = (spans[-1][0], max(spans[-1][1], b))
        else:
            spans.append((a, b))
    return db, {"solution_key": key, "completed": [list(s) for s in spans]}


def cmd_integrate(run: Run, cfg, args):
    sol = build_solution(cfg)
    sol, _ = apply_chain(cfg, sol)
    path = parse_path(cfg)
    tol = parse_tol(cfg)
    spacing = float(get(cfg, "spacing", 0.05))
    init = sol.state(path.start)
    traj = integrate(init, sol.params, path, tol, spacing=spacing)
    buf = io.StringIO()
    traj.to_jsonl(buf)
    run.add("traj.jsonl", buf.getvalue())
    run.add("poles.jsonl", poles_text(traj.poles))
    run.summary = {"samples": len(traj.z), "poles": len(traj.poles), "params": _params_out(sol.params),
                   "end": {"z": cx_out(traj.z[-1]), "p": cx_out(traj.p[-1]), "q": cx_out(traj.q[-1])}}
    run.commit()


def _params_out(p: Params):
    return {"alpha": cx_out(p.alpha), "beta": cx_out(p.beta)}


def cmd_scan(run: Run, cfg, args):
    sol = build_solution(cfg)
    sol, _ = apply_chain(cfg, sol)
    db, book = _resumable_scan(run, sol, cfg, args.jobs)
    run.add("poles.jsonl", poles_text(db.records))
    run.summary = {"poles": len(db.records), "counts": db.counts(db.region[1]),
                   "count_mismatch": db.diagnostics.get("count_mismatch", [])}
    run.commit(book)


def cmd_strings(run: Run, cfg, args):
    sol = build_solution(cfg)
    sol, _ = apply_chain(cfg, sol)
    db, book = _resumable_scan(run, sol, cfg, args.jobs)
    strings, unchained, links = track_strings(db, window=float(get(cfg, "window", 0.3)))
    by_lam = {m.lam: m for s in strings for m in s.members}
    recs = [by_lam.get(r.lam, r) for r in db.records]
    run.add("poles.jsonl", poles_text(recs))
    run.add("strings.csv", csv_text(
        ["string_id", "members[count]", "head[count]", "varpi_kind", "direction[rad]", "residue", "outer[|z|]"],
        [[s.id, len(s.members), s.head, s.varpi_kind.value, fmt(s.direction),
          s.residue.tag if s.residue is not None else "", fmt(s.outer)] for s in strings]))
    run.add("links.csv", csv_text(["string_id", "lambda_re[z]", "lambda_im[z]", "error[1/|lambda|]", "head"],
                                  [[l.string_id, fmt(l.lam.real), fmt(l.lam.imag), fmt(l.error * abs(l.lam)),
                                    int(l.head)] for l in links]))
    body = [l.error * abs(l.lam) for l in links if not l.head]
    run.summary = {"strings": len(strings), "unchained": len(unchained),
                   "max_link_error": max(body) if body else None}
    run.commit(book)


def _census_radii(cfg, r0, r1):
    radii = get(cfg, "radii")
    if radii is None:
        radii = list(np.linspace(r0 + (r1 - r0) / 5, r1, 5))
    return [float(r) for r in radii]


def cmd_census(run: Run, cfg, args):
    sol = build_solution(cfg)
    sol, _ = apply_chain(cfg, sol)
    db, book = _resumable_scan(run, sol, cfg, args.jobs)
    r0, r1, _ = _scan_cfg(cfg)
    rep = census(db, _census_radii(cfg, r0, r1))
    run.add("poles.jsonl", poles_text(db.records))
    run.add("census.csv", census_text(rep))
    run.summary = {"string_counts": list(rep.string_counts), "delta0": rep.delta0, "raw_delta": rep.raw_delta,
                   "growth_c": rep.growth_c, "single_residue_class": sum(1 for c in rep.counts[-1][1:] if c) <= 1}
    run.commit(book)


def cmd_backlund(run: Run, cfg, args):
    base = build_solution(cfg)
    text = get(cfg, "chain", required=True)
    try:
        steps = parse_chain(text)
    except ValueError as exc:
        raise ConfigError(f"chain: {exc}") from None
    trace = [_params_out(base.params)]
    p = base.params
    for st in steps:
        p = map_params(st, p)
        trace.append(_params_out(p))
    out = chain(steps, base)
    zs = probe_points(16, seed=99)
    run.summary = {"chain": text, "params_trace": trace, "final_params": _params_out(out.params),
                   "residual": float(np.max(eq1_residual(out, zs)))}
    if get(cfg, "region") is not None:
        r0, r1, density = _scan_cfg(cfg)
        radii = _census_radii(cfg, r0, r1)
        for tag, sol in (("before", base), ("after", out)):
            db = scan(sol, r0, r1, density=density, jobs=args.jobs)
            rep = census(db, radii)
            run.add(f"{tag}.census.csv", census_text(rep))
            run.add(f"{tag}.poles.jsonl", poles_text(db.records))
            run.summary[tag] = {"string_counts": list(rep.string_counts), "delta0": rep.delta0,
                                "raw_delta": rep.raw_delta}
    run.add("backlund.json", json.dumps(run.summary, sort_keys=True, indent=1) + "\n")
    run.commit()


def cmd_asymptotics(run: Run, cfg, args):
    params = parse_params(cfg)
    N = int(get(cfg, "N", 3))
    if N < 1:
        raise ConfigError("N must be >= 1")
    fam = get(cfg, "family", "zero")
    if fam == "zero":
        s = series_zero(params, N)
    elif fam == "third":
        s = series_third(params, parse_root(get(cfg, "tau", "1"), "tau"), N)
    else:
        raise ConfigError(f"family: unknown family {fam!r}; zero or third")
    run.add("series.json", json.dumps(s.to_dict(), sort_keys=True, indent=1) + "\n")
    run.summary = {"family": fam, "N": N}
    if get(cfg, "decay") is not None:
        sol = build_solution(cfg)
        if not isinstance(sol, FirstKindSolution):
            raise ConfigError("decay study needs a first-kind solution (solution.kind = first)")
        rows = []
        for th in attracting_bisectors(sol):
            for n in get(cfg, "decay.N", [1, 2, 3]):
                f = riccati_decay(sol, int(n), th)
                rows.append([fmt(th), f.tau.tag, f.N, fmt(f.slope), f.expected, int(f.degenerate)])
        run.add("decay.csv", csv_text(["theta[rad]", "tau", "N", "slope[log err/log r]", "expected", "degenerate"],
                                      rows))
        run.summary["decay_rows"] = len(rows)
    run.commit()


def cmd_rescale(run: Run, cfg, args):
    sol = build_solution(cfg)
    sol, _ = apply_chain(cfg, sol)
    items = [cx_in(k, "kappas") for k in get(cfg, "kappas", [])]
    if get(cfg, "region") is not None:
        r0, r1, density = _scan_cfg(cfg)
        items += scan(sol, r0, r1, density=density, jobs=args.jobs).records
    samples = cluster_estimate(sol, items)
    buf = io.StringIO()
    write_cluster_csv(samples, buf)
    run.add("cluster.csv", buf.getvalue())
    conv = get(cfg, "convergence")
    if conv is not None:
        ks = [cx_in(k, "convergence") for k in conv]
        rep = convergence_diagnostic(sol, ks)
        run.add("rescale.csv", csv_text(["kappa_re[z]", "kappa_im[z]", "sup_residual[scaled]", "masked[fraction]"],
                                        [[fmt(k.real), fmt(k.imag), fmt(s), fmt(m)] for k, s, m in
                                         zip(rep.kappas, rep.sup_residual, rep.masked_fraction)]))
        run.summary["monotone"] = rep.monotone
    pole_c = [s.c for s in samples if s.branch == "pole"]
    run.summary.update({"samples": len(samples),
                        "max_pole_deviation": max((abs(c - 1 / 3) for c in pole_c), default=None)})
    run.commit()


def cmd_riccati(run: Run, cfg, args):
    sol = build_solution(cfg)
    zs = probe_points(64, seed=2024)
    p, q = sol.evaluate(zs)
    rep = {"description": sol.description, "params": _params_out(sol.params),
           "system_residual": float(np.max(eq1_residual(sol, zs[:16])))}
    if isinstance(sol, FirstKindSolution):
        r = sol.rho
        rep["kind"] = "first"
        rep["class_residual"] = float(np.max(np.abs(r.conj().value * p + r.value * q - zs) / (1 + np.abs(zs))))
        rep["hamiltonian_identity"] = float(np.max(np.abs(sol.hamiltonian_identity(zs)) / (1 + np.abs(zs) ** 3)))
    elif isinstance(sol, SecondKindSolution):
        rep["kind"] = "second"
        poles = None
        if get(cfg, "region") is not None:
            r0, r1, density = _scan_cfg(cfg)
            poles = scan(sol, r0, r1, density=density, jobs=args.jobs).records
        for om in (sol.rho, sol.rho.conj()):
            s2 = second_kind_residuals(sol, om, poles=poles)
            rep[f"identities_{om.tag}"] = {"riccati_u": s2.riccati_u, "k_invariant": s2.k_invariant,
                                           "h_identity": s2.h_identity, "h_law": s2.h_law,
                                           "h_law_printed": s2.h_law_printed}
    else:
        raise ConfigError("riccati: solution.kind must be first or second")
    run.summary = rep
    run.add("riccati.json", json.dumps(rep, sort_keys=True, indent=1, default=str) + "\n")
    run.commit()


def cmd_report(run: Run, cfg, args):
    rows = []
    for mp in sorted(run.out_dir.glob("*.manifest.json")):
        if mp.name == run.manifest_path().name:
            continue
        man = json.loads(mp.read_text())
        s = man.get("summary", {})
        s = {**s.get("after", {}), **s}  # backlund runs report the transformed census
        rows.append([man.get("name"), man.get("command"), s.get("poles", ""),
                     s.get("delta0", ""), s.get("raw_delta", ""),
                     json.dumps(s["string_counts"]) if "string_counts" in s else ""])
    run.add("report.csv", csv_text(["name", "command", "poles[count]", "delta0[1]", "raw_delta[1]",
                                    "string_counts[units]"], rows))
    run.summary = {"runs": len(rows)}
    run.commit()


COMMANDS = {
    "integrate": cmd_integrate, "scan": cmd_scan, "strings": cmd_strings, "census": cmd_census,
    "backlund": cmd_backlund, "asymptotics": cmd_asymptotics, "rescale": cmd_rescale,
    "riccati": cmd_riccati, "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="phlab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("-c", "--config", default=None, help="JSON config file, '-' for stdin")
        sp.add_argument("-o", "--out", default=None, help="output directory (default $PHLAB_OUT or .)")
        sp.add_argument("-n", "--name", default=None, help="output file prefix (default: command name)")
        sp.add_argument("-j", "--jobs", type=int, default=1, help="parallel scan workers")
        sp.add_argument("--chain", default=None, help="Backlund chain, e.g. 'Mw;B1;R'")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=JSON",
                        help="override a config field, e.g. region.r1=12")
        sp.add_argument("--force", action="store_true", help="rerun even if the manifest is complete")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else {}
        for item in args.set:
            key, sep, val = item.partition("=")
            if not sep:
                raise ConfigError(f"--set {item!r}: expected KEY=JSON")
            try:
                set_path(cfg, key, json.loads(val))
            except json.JSONDecodeError:
                set_path(cfg, key, val)
        if args.chain is not None:
            cfg["chain"] = args.chain
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        out_dir = Path(args.out or os.environ.get("PHLAB_OUT") or ".")
        run = Run(out_dir, args.name or args.command, args.command, cfg)
        if not args.force and run.up_to_date():
            print(f"{run.name}: up to date", file=sys.stderr)
            return EXIT_OK
        COMMANDS[args.command](run, cfg, args)
        print(json.dumps(run.summary, sort_keys=True, default=str))
        return EXIT_OK
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IdenticallySingular as exc:
        print(f"class condition: {exc} (step index {exc.step_index})", file=sys.stderr)
        return EXIT_CLASS
    except (ClassConditionViolated, ExceptionalParameters) as exc:
        print(f"class condition: {exc}", file=sys.stderr)
        return EXIT_CLASS
    except PhlabError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (FloatingPointError, OverflowError, ZeroDivisionError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
