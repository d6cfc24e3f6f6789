"""Command-line front end.

Configuration is layered: a flat key=value file, then command-line flags,
then FIG8_* environment variables. Exit codes: 0 pass, 1 failed assertion,
2 usage or configuration error.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from fractions import Fraction

import click

from .invariants import LevelContext, compute_invariant, jones_fig8, surgery_coefficient

CACHE_VERSION = 1
CACHE_FILE = "tau_cache.jsonl"
CONFIG_KEYS = ("threads", "cache_dir", "quad_tol", "output_format", "m_multiplicity", "sigma_mode")


class ConfigError(click.UsageError):
    """Invalid configuration; reported with exit code 2."""


@dataclass
class RunConfig:
    threads: int = 1
    cache_dir: str | None = None
    quad_tol: float = 1e-12
    output_format: str = "csv"
    m_multiplicity: int = 4
    sigma_mode: str = "calibrate"

    def validate(self) -> "RunConfig":
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if not 0 < self.quad_tol <= 1e-4:
            raise ConfigError("quad_tol must lie in (0, 1e-4]")
        if self.output_format not in ("csv", "json"):
            raise ConfigError("output_format must be csv or json")
        if self.sigma_mode not in ("zero", "calibrate"):
            raise ConfigError("sigma_mode must be zero or calibrate")
        if self.m_multiplicity < 1:
            raise ConfigError("m_multiplicity must be a positive integer")
        return self


def _coerce(key: str, raw):
    types = {f.name: f.type for f in fields(RunConfig)}
    try:
        if key in ("threads", "m_multiplicity"):
            return int(raw)
        if key == "quad_tol":
            return float(raw)
        return str(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key} ({types[key]}): {raw!r}") from exc


def read_config_file(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in CONFIG_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = _coerce(key, val)
    return out


def load_config(path: str | None = None, flags: dict | None = None, environ=None) -> RunConfig:
    """File < flags < FIG8_* environment."""
    environ = os.environ if environ is None else environ
    values: dict = {}
    if path:
        values.update(read_config_file(path))
    values.update({k: v for k, v in (flags or {}).items() if v is not None})
    for key in CONFIG_KEYS:
        env = environ.get("FIG8_" + key.upper())
        if env is not None:
            values[key] = _coerce(key, env)
    return RunConfig(**values).validate()


class InvariantCache:
    """Line-delimited JSON cache of tau_r(M_{p/q}), rewritten by atomic rename on flush."""

    def __init__(self, directory: str | None):
        self.directory = directory
        self.entries: dict[tuple[int, int, int], dict] = {}
        self.dirty = False
        if directory:
            os.makedirs(directory, exist_ok=True)
            self._load()

    @property
    def path(self) -> str | None:
        return os.path.join(self.directory, CACHE_FILE) if self.directory else None

    def _load(self):
        if not os.path.exists(self.path):
            return
        with open(self.path) as fh:
            for line in fh:
                try:
                    e = json.loads(line)
                except json.JSONDecodeError:
                    continue
                if e.get("version") == CACHE_VERSION:
                    self.entries[tuple(e["key"])] = e

    def get(self, p: int, q: int, r: int) -> complex | None:
        e = self.entries.get((p, q, r))
        return None if e is None else complex(e["tau_re"], e["tau_im"])

    def put(self, p: int, q: int, r: int, tau: complex):
        self.entries[(p, q, r)] = {"key": [p, q, r], "tau_re": tau.real, "tau_im": tau.imag,
                                   "version": CACHE_VERSION, "created": time.time()}
        self.dirty = True

    def flush(self):
        if not self.directory or not self.dirty:
            return
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".tau_cache.")
        with os.fdopen(fd, "w") as fh:
            for key in sorted(self.entries):
                fh.write(json.dumps(self.entries[key]) + "\n")
        os.replace(tmp, self.path)
        self.dirty = False


def tau_cached(cache: InvariantCache, p: int, q: int, r: int) -> tuple[complex, bool]:
    hit = cache.get(p, q, r)
    if hit is not None:
        return hit, True
    tau = compute_invariant(p, q, r).tau
    cache.put(p, q, r, tau)
    return tau, False


def parse_r_range(text: str) -> list[int]:
    """'10', '5..40' or '50,100,200'."""
    out = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                a, b = part.split("..")
                out.extend(range(int(a), int(b) + 1))
            else:
                out.append(int(part))
    except ValueError as exc:
        raise click.BadParameter(f"cannot parse r specification {text!r}") from exc
    if not out or min(out) < 2:
        raise click.BadParameter("r must be >= 2")
    return out


def parse_pq_list(text: str) -> list[tuple[int, int]]:
    out = []
    for part in text.split(","):
        part = part.strip()
        try:
            p, q = (part.split("/") + ["1"])[:2]
            out.append((int(p), int(q)))
        except ValueError as exc:
            raise click.BadParameter(f"cannot parse slope {part!r}") from exc
    for p, q in out:
        _checked_surgery(p, q)
    return out


def _checked_surgery(p: int, q: int):
    if q == 0:
        raise click.BadParameter("q must be nonzero")
    if math.gcd(p, q) != 1:
        raise click.BadParameter(f"{p}/{q}: p/q not in lowest terms")
    return surgery_coefficient(p, q)


def _emit(rows: list[dict], fmt: str, out=None):
    out = out or sys.stdout
    if fmt == "json":
        out.write(json.dumps(rows, indent=2) + "\n")
        return
    if not rows:
        return
    w = csv.DictWriter(out, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)


def _json_default(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, Fraction):
        return str(obj)
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if hasattr(obj, "item"):
        return obj.item()
    raise TypeError(f"not serializable: {type(obj)}")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, default=_json_default)


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="key=value configuration file")
@click.option("--threads", type=int, default=None)
@click.option("--cache-dir", type=click.Path(file_okay=False), default=None)
@click.option("--format", "output_format", type=click.Choice(["csv", "json"]), default=None)
@click.option("--m", "m_multiplicity", type=int, default=None, help="multiplicity m in the prediction")
@click.option("--sigma-mode", type=click.Choice(["zero", "calibrate"]), default=None)
@click.pass_context
def main(ctx, config_path, threads, cache_dir, output_format, m_multiplicity, sigma_mode):
    """Quantum invariants of surgeries on the figure-8 knot."""
    flags = {"threads": threads, "cache_dir": cache_dir, "output_format": output_format,
             "m_multiplicity": m_multiplicity, "sigma_mode": sigma_mode}
    ctx.obj = load_config(config_path, flags)


@main.command()
@click.option("-p", type=int, required=True)
@click.option("-q", type=int, default=1, show_default=True)
@click.option("-r", "r_spec", required=True, help="level(s): 10, 5..40 or 5,7,9")
@click.pass_obj
def invariant(cfg: RunConfig, p, q, r_spec):
    """tau_r(M_{p/q}) for each requested r."""
    _checked_surgery(p, q)
    cache = InvariantCache(cfg.cache_dir)
    rows = []
    for r in parse_r_range(r_spec):
        tau, _ = tau_cached(cache, p, q, r)
        rows.append({"r": r, "tau_re": tau.real, "tau_im": tau.imag, "tau_abs": abs(tau)})
    cache.flush()
    _emit(rows, cfg.output_format)


@main.command()
@click.option("-r", "r_spec", required=True)
@click.option("--leading/--no-leading", default=True, help="include the leading asymptotic term")
@click.pass_obj
def jones(cfg: RunConfig, r_spec, leading):
    """Colored Jones value J'(r) at color r, with its leading asymptotics."""
    from .saddle import jones_leading

    rows = []
    for r in parse_r_range(r_spec):
        J = jones_fig8(LevelContext(r), r)
        row = {"r": r, "jones": J}
        if leading:
            lead = jones_leading(r)
            row.update({"leading": lead, "ratio": J / lead})
        rows.append(row)
    _emit(rows, cfg.output_format)


@main.command()
@click.option("-p", type=int, required=True)
@click.option("-q", type=int, default=1, show_default=True)
@click.pass_obj
def critical(cfg: RunConfig, p, q):
    """Critical points on S with CS values, Hessians and classification (JSON)."""
    from .chernsimons import cs_class
    from .saddle import classify_nondegenerate, positive_definite_witness, su2_critical_points

    sc = _checked_surgery(p, q)
    points = []
    for pt in su2_critical_points(sc):
        cs = cs_class(sc, pt.rep_class)
        cls = classify_nondegenerate(sc, pt)
        wit = positive_definite_witness(pt)
        dist = abs((pt.psi_value.real - cs + 0.5) % 1 - 0.5)
        points.append({"theta": pt.rep_class.theta, "eps": pt.rep_class.eps, "x": pt.x, "y": pt.y,
                       "a": pt.index.a, "b": pt.index.b, "n": pt.index.n, "psi": pt.psi_value, "cs": cs,
                       "defect": dist, "grad_norm": pt.grad_norm, "det_h": pt.det_h,
                       "nondegenerate": cls["nondegenerate"], "degenerate_candidate": cls["degenerate_candidate"],
                       "positive_definite": wit is not None, "witness": wit})
    click.echo(_dump({"p": sc.p, "q": sc.q, "points": points}))


@main.command("chern-simons")
@click.option("-p", type=int, required=True)
@click.option("-q", type=int, default=1, show_default=True)
@click.pass_obj
def chern_simons(cfg: RunConfig, p, q):
    """Chern-Simons values of all flat SU(2) classes (JSON)."""
    from .chernsimons import cs_class
    from .repvar import enumerate_su2_moduli

    sc = _checked_surgery(p, q)
    classes = []
    for c in enumerate_su2_moduli(sc):
        cs_class(sc, c)
        d = asdict(c)
        classes.append(d)
    click.echo(_dump({"p": sc.p, "q": sc.q, "classes": classes}))


@main.command()
@click.option("-p", type=int, required=True)
@click.option("-q", type=int, default=1, show_default=True)
@click.option("-r", "r_spec", required=True)
@click.pass_obj
def asymptotics(cfg: RunConfig, p, q, r_spec):
    """Leading-order prediction for tau_bar_r next to the exact value."""
    sc = _checked_surgery(p, q)
    rs = parse_r_range(r_spec)
    sigma = _sigma_for(cfg, sc, rs)
    rows = []
    for r in rs:
        rows.append(_sweep_row((sc.p, sc.q, r, cfg.m_multiplicity, sigma, None)))
    _emit(rows, cfg.output_format)


def _sigma_for(cfg: RunConfig, sc, rs):
    from .saddle import calibrate_sigma

    if cfg.sigma_mode == "zero":
        return None
    return calibrate_sigma(sc, [r for r in range(101, 161) if r not in rs], m=cfg.m_multiplicity)


def _sweep_row(job) -> dict:
    from .saddle import leading_tau_asymptotics

    p, q, r, m, sigma, tau = job
    if tau is None:
        tau = compute_invariant(p, q, r).tau
    tb = tau.conjugate()
    pred, _ = leading_tau_asymptotics((p, q), r, m=m, sigma=sigma)
    rel = abs(tb - pred) / abs(tb) if tb != 0 else math.inf
    return {"p": p, "q": q, "r": r, "tau_re": tb.real, "tau_im": tb.imag,
            "pred_re": pred.real, "pred_im": pred.imag, "rel_residual": rel}


def run_sweep(cfg: RunConfig, pq_list, r_list) -> list[dict]:
    """Rows in (p/q, r) input order; the pool only changes scheduling, not results."""
    cache = InvariantCache(cfg.cache_dir)
    jobs = []
    for p, q in pq_list:
        sc = surgery_coefficient(p, q)
        sigma = _sigma_for(cfg, sc, r_list)
        for r in r_list:
            jobs.append((p, q, r, cfg.m_multiplicity, sigma, cache.get(p, q, r)))
    if cfg.threads > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            rows = list(pool.map(_sweep_row, jobs))
    else:
        rows = [_sweep_row(j) for j in jobs]
    for row in rows:
        if cache.get(row["p"], row["q"], row["r"]) is None:
            cache.put(row["p"], row["q"], row["r"], complex(row["tau_re"], -row["tau_im"]))
    cache.flush()
    return rows


@main.command()
@click.option("--pq", "pq_spec", required=True, help="slopes, e.g. 1/1,2/1,3/1")
@click.option("--r", "r_spec", required=True, help="levels, e.g. 50,100,200,400")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.pass_obj
def sweep(cfg: RunConfig, pq_spec, r_spec, out):
    """tau_bar, prediction and relative residual over a grid (CSV by default)."""
    pq_list = parse_pq_list(pq_spec)
    for p, _ in pq_list:
        if p == 0:
            raise click.BadParameter("sweep needs p/q != 0")
    rows = run_sweep(cfg, pq_list, parse_r_range(r_spec))
    if out:
        with open(out, "w", newline="") as fh:
            _emit(rows, cfg.output_format, fh)
    else:
        _emit(rows, cfg.output_format)


@main.command()
@click.argument("suites", nargs=-1, required=True)
@click.option("--pq", "pq_spec", default=None, help="slopes for the aec suite")
@click.option("--r", "r_spec", default=None, help="levels for the volume and aec suites")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=".", show_default=True)
@click.pass_obj
def verify(cfg: RunConfig, suites, pq_spec, r_spec, out_dir):
    """Run verification suites and write one JSON report file per suite."""
    from .verify import SUITES, run_suite

    for s in suites:
        if s not in SUITES:
            raise click.BadParameter(f"unknown suite {s!r}; choose from {', '.join(SUITES)}")
    os.makedirs(out_dir, exist_ok=True)
    ok = True
    for s in suites:
        kw = {}
        if s in ("volume", "aec") and r_spec:
            kw["r_list"] = parse_r_range(r_spec)
        if s == "aec":
            if pq_spec:
                kw["pq_list"] = parse_pq_list(pq_spec)
            kw["m"] = cfg.m_multiplicity
            kw["sigma_mode"] = cfg.sigma_mode
        reports = run_suite(s, **kw)
        docs = [rep.to_dict() for rep in reports]
        path = os.path.join(out_dir, f"{s}_report.json")
        with open(path, "w") as fh:
            json.dump(docs, fh, indent=2)
        for rep in reports:
            conj = rep.parameters.get("conjectural", False)
            status = "REPORT" if conj else ("PASS" if rep.passed else "FAIL")
            tag = " conjectural" if conj else ""
            click.echo(f"{status} {rep.name} max_defect={rep.max_defect:.3e} tol={rep.tolerance:g}{tag}")
            ok &= rep.passed
    click.echo(f"reports written to {out_dir}")
    sys.exit(0 if ok else 1)


def format_rows(rows: list[dict], fmt: str) -> str:
    buf = io.StringIO()
    _emit(rows, fmt, buf)
    return buf.getvalue()


if __name__ == "__main__":
    main()
