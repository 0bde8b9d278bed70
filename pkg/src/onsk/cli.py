"""Command-line interface: verify identity suites, dump operators, list spectra.

Subcommands:
  verify    run a named check suite and report pass/fail per identity
  dump      print one constructed object as sparse (row, col, value) entries
  spectrum  print eigenvalue certificates, by default as CSV rows

Exit status is 0 when every check passes, 1 when any check fails (the first
failing identity is named on stderr) and 2 for configuration errors.  The
environment variable ONSK_SEED overrides --seed.  Parameter literals are
exact rationals, "3/5" or "1/2+2/3*i".  Runs with the same seed and flags
produce byte-identical reports apart from the elapsed_ms field of JSON
output, which is wall-clock timing.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .field import (BadLiteral, GenericityError, Params, PoleError,
                    format_scalar, make_params, parse_scalar, sample_params)
from .kmatrix import (ZeroNormalizer, build_kkk, build_ktr,
                      check_commutativity, check_intertwining,
                      check_kh_commute, check_unitarity)
from .linalg import Operator
from .onsager import (CoidealSpec, SpecError, ZeroParameter,
                      check_onsager_relations, check_routes_agree,
                      check_tl_relations, hamiltonian, onsager_generators)
from .report import Report
from .sp4 import TruncationMarginError, check_annihilation, check_lemma_identities
from .spectra import (DegenerateEigenvalues, spectra_csv, spectrum_family,
                      spectrum_suite)
from .spinrep import (FAMILIES, Family, RangeError, check_defining_relations,
                      generators)

SUITES = ("defining-relations", "onsager", "kmatrix", "spectra", "sp4", "all")
DUMP_TARGETS = ("kmatrix", "hamiltonian", "generators")
FORMATS = ("text", "json", "csv")

_SUITE_ORDER = ("defining-relations", "onsager", "kmatrix", "spectra", "sp4")

# chain family -> eigenvalue family of its K matrix
_SPECTRAL_TAG = {"A1": "tr", "D2": "k11", "B1": "k21", "BT1": "k12", "D1": "k22"}

_CONFIG_ERRORS = (BadLiteral, GenericityError, PoleError, RangeError,
                  SpecError, TruncationMarginError, ZeroNormalizer,
                  ZeroParameter, OSError)


class ConfigError(ValueError):
    """Unusable flag combination; reported on stderr with exit status 2."""


class RunConfig:
    """One resolved invocation: subcommand plus every knob the runners read."""

    __slots__ = ("subcommand", "suite", "target", "family", "n", "k", "kp",
                 "seed", "t", "z", "eps", "mu", "trunc", "format", "output",
                 "jobs")

    def __init__(self, subcommand: str, *, suite=None, target=None,
                 family=None, n=None, k=None, kp=None, seed=0, t=None, z=None,
                 eps=None, mu=None, trunc=10, format="text", output=None,
                 jobs=1) -> None:
        self.subcommand = subcommand
        self.suite = suite
        self.target = target
        self.family = family
        self.n = n
        self.k = k
        self.kp = kp
        self.seed = seed
        self.t = t
        self.z = z
        self.eps = eps
        self.mu = mu
        self.trunc = trunc
        self.format = format
        self.output = output
        self.jobs = jobs

    def __repr__(self) -> str:
        core = self.suite or self.target or ""
        return f"RunConfig({self.subcommand} {core}, seed={self.seed})"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="onsk",
        description="Exact checks for reflection K matrices and "
                    "Onsager-algebra spin chains.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=0,
                       help="parameter sample seed; env ONSK_SEED overrides")
        p.add_argument("--t", type=parse_scalar, default=None, metavar="LIT",
                       help='deformation parameter, e.g. "2/5" or "1/2+1/3*i"')
        p.add_argument("--z", type=parse_scalar, default=None, metavar="LIT",
                       help="spectral parameter literal")
        p.add_argument("--eps", type=int, choices=(1, -1), default=None,
                       help="sign normalization of p")
        p.add_argument("--mu", type=int, choices=(1, -1), default=None,
                       help="sign normalization of the square root of q")
        p.add_argument("--format", choices=FORMATS, default=None,
                       help="output format; defaults to text, or csv for "
                            "spectral certificates")
        p.add_argument("--output", default=None, metavar="PATH",
                       help="write the report to a file instead of stdout")
        p.add_argument("--jobs", type=int, default=1,
                       help="accepted for compatibility; runs are serial")

    pv = sub.add_parser("verify", help="run a check suite")
    pv.add_argument("--suite", choices=SUITES, default="all")
    pv.add_argument("--family", default=None,
                    help="chain family: A, D2, B1, BT1 or D1")
    pv.add_argument("--n", type=int, default=None, help="number of sites")
    pv.add_argument("--k", type=int, default=None,
                    help="left boundary label (bounded families only)")
    pv.add_argument("--kp", type=int, default=None,
                    help="right boundary label (bounded families only)")
    pv.add_argument("--trunc", type=int, default=10, metavar="M",
                    help="Fock-space cutoff for the sp4 suite (>= 10)")
    add_common(pv)

    pd = sub.add_parser("dump", help="print a constructed object")
    pd.add_argument("target", choices=DUMP_TARGETS)
    pd.add_argument("--family", required=True,
                    help="chain family: A, D2, B1, BT1 or D1")
    pd.add_argument("--n", type=int, required=True, help="number of sites")
    pd.add_argument("--k", type=int, default=None,
                    help="left boundary label (bounded families only)")
    pd.add_argument("--kp", type=int, default=None,
                    help="right boundary label (bounded families only)")
    add_common(pd)

    ps = sub.add_parser("spectrum", help="print eigenvalue certificates")
    ps.add_argument("--family", default=None,
                    help="restrict to one family's K matrix")
    ps.add_argument("--n", type=int, required=True, help="number of sites")
    add_common(ps)
    return parser


def resolve(args: argparse.Namespace) -> RunConfig:
    """Combine parsed flags with the environment into a RunConfig."""
    seed = args.seed
    env = os.environ.get("ONSK_SEED")
    if env is not None and env.strip():
        try:
            seed = int(env)
        except ValueError:
            raise ConfigError(f"ONSK_SEED must be an integer, got {env!r}") from None
    if args.jobs < 1:
        raise ConfigError(f"--jobs must be >= 1, got {args.jobs}")

    family = getattr(args, "family", None)
    if family is not None:
        tag = family.upper()
        tag = "A1" if tag == "A" else tag
        if tag not in FAMILIES:
            raise ConfigError(f"unknown family {family!r}; "
                              f"choose from A, D2, B1, BT1, D1")
        family = tag

    suite = getattr(args, "suite", None)
    fmt = args.format
    if fmt is None:
        spectral = args.subcommand == "spectrum" or suite == "spectra"
        fmt = "csv" if spectral else "text"

    return RunConfig(args.subcommand, suite=suite,
                     target=getattr(args, "target", None), family=family,
                     n=getattr(args, "n", None), k=getattr(args, "k", None),
                     kp=getattr(args, "kp", None), seed=seed, t=args.t,
                     z=args.z, eps=args.eps, mu=args.mu,
                     trunc=getattr(args, "trunc", 10), format=fmt,
                     output=args.output, jobs=args.jobs)


def resolved_params(cfg: RunConfig) -> Params:
    """Seeded sample point with any explicit flag overrides applied."""
    base = sample_params(cfg.seed)
    return make_params(cfg.t if cfg.t is not None else base.t,
                       cfg.z if cfg.z is not None else base.z,
                       cfg.eps if cfg.eps is not None else base.eps,
                       cfg.mu if cfg.mu is not None else base.mu)


def _family(cfg: RunConfig) -> Family:
    what = cfg.suite or cfg.target or cfg.subcommand
    if cfg.family is None:
        raise ConfigError(f"--family is required for {what}")
    if cfg.n is None:
        raise ConfigError(f"--n is required for {what}")
    return Family(cfg.family, cfg.n)


def _coideal(cfg: RunConfig, fam: Family) -> CoidealSpec:
    if fam.tag == "A1":
        if cfg.k is not None or cfg.kp is not None:
            raise ConfigError("--k/--kp apply only to the bounded families")
        return CoidealSpec(fam)
    # boundary labels default to the smallest pair the family admits
    k = cfg.k if cfg.k is not None else fam.r
    kp = cfg.kp if cfg.kp is not None else fam.rp
    return CoidealSpec(fam, k, kp)


# ---------------------------------------------------------------------------
# verify


def _suite_defining(cfg: RunConfig, params: Params) -> Report:
    fam = _family(cfg)
    return check_defining_relations(fam, generators(fam, params), params)


def _suite_onsager(cfg: RunConfig, params: Params) -> Report:
    spec = _coideal(cfg, _family(cfg))
    rep = Report("onsager suite")
    rep.extend(check_routes_agree(spec, params))
    rep.extend(check_onsager_relations(onsager_generators(spec, params),
                                       spec.fam.cartan, params))
    if spec.fam.tag == "A1":
        rep.extend(check_tl_relations(spec.fam.n, params))
    return rep


def _suite_kmatrix(cfg: RunConfig, params: Params) -> Report:
    fam = _family(cfg)
    spec = _coideal(cfg, fam)
    rep = Report("kmatrix suite")
    if fam.tag == "A1":
        alt = sample_params(cfg.seed + 1)
        w = alt.z if alt.z != params.z else alt.z.inverse()
        rep.extend(check_unitarity(fam.n, params.z, params))
        rep.extend(check_commutativity(fam.n, params.z, w, params))
    rep.extend(check_intertwining(spec, params))
    rep.extend(check_kh_commute(spec, params))
    return rep


def _spectral_reports(cfg: RunConfig, params: Params) -> list:
    if cfg.n is None:
        raise ConfigError("--n is required for spectral certificates")
    if cfg.family is None:
        return spectrum_suite(cfg.n, params)
    fam = _family(cfg)
    return spectrum_family(_SPECTRAL_TAG[fam.tag], fam.n, params)


def _spectral_checks(reports) -> Report:
    rep = Report("spectral certificates")
    for sr in reports:
        for row in sr.rows:
            where = f"l={row.l}" if row.j is None else f"l={row.l} j={row.j}"
            rep.add(f"{row.family} n={row.n} {where} eigenvalue", row.ok,
                    f"value {format_scalar(row.value)}, "
                    f"rank {row.rank}, expected {row.expected}")
        rep.extend(sr.checks)
    return rep


def _suite_sp4(cfg: RunConfig, params: Params) -> Report:
    if cfg.trunc < 10:
        raise ConfigError(f"the sp4 suite needs --trunc >= 10, got {cfg.trunc}")
    rep = Report("sp4 suite")
    rep.extend(check_lemma_identities(params, cfg.trunc))
    for r, k in ((1, 1), (1, 2), (2, 2)):
        rep.extend(check_annihilation(r, k, params, cfg.trunc))
    return rep


def cmd_verify(cfg: RunConfig) -> int:
    start = time.perf_counter()
    params = resolved_params(cfg)
    wanted = _SUITE_ORDER if cfg.suite == "all" else (cfg.suite,)
    rep = Report(f"verify {cfg.suite}")
    spectral = None
    for suite in wanted:
        if suite == "defining-relations":
            rep.extend(_suite_defining(cfg, params))
        elif suite == "onsager":
            rep.extend(_suite_onsager(cfg, params))
        elif suite == "kmatrix":
            rep.extend(_suite_kmatrix(cfg, params))
        elif suite == "spectra":
            try:
                spectral = _spectral_reports(cfg, params)
            except DegenerateEigenvalues as exc:
                rep.add("generic spectral sample", False, str(exc))
            else:
                rep.extend(_spectral_checks(spectral))
        else:
            rep.extend(_suite_sp4(cfg, params))
    elapsed_ms = int((time.perf_counter() - start) * 1000)
    if cfg.format == "csv" and cfg.suite == "spectra" and spectral is not None:
        text = spectra_csv(spectral)
    else:
        text = _render_checks(cfg, rep, params, elapsed_ms)
    _emit(cfg, text)
    return _verdict(rep)


def _verdict(rep: Report) -> int:
    bad = rep.failures()
    if not bad:
        return 0
    print(f"FAIL: {bad[0].name}", file=sys.stderr)
    return 1


# ---------------------------------------------------------------------------
# rendering


def _params_dict(params: Params) -> dict:
    return {"t": format_scalar(params.t), "z": format_scalar(params.z),
            "eps": params.eps, "mu": params.mu}


def _csv_field(s: str) -> str:
    if any(ch in s for ch in ',"\n'):
        return '"' + s.replace('"', '""') + '"'
    return s


def _render_checks(cfg: RunConfig, rep: Report, params: Params,
                   elapsed_ms: int) -> str:
    if cfg.format == "json":
        doc = {"suite": cfg.suite or cfg.subcommand, "family": cfg.family,
               "n": cfg.n, "params": _params_dict(params),
               "checks": [c.to_dict() for c in rep.checks],
               "elapsed_ms": elapsed_ms}
        return json.dumps(doc, indent=2) + "\n"
    if cfg.format == "csv":
        lines = ["name,status,detail"]
        for c in rep.checks:
            lines.append(",".join(
                _csv_field(x) for x in (c.name, c.status, c.detail)))
        return "\n".join(lines) + "\n"
    head = [rep.title]
    if cfg.family is not None:
        head.append(f"family={cfg.family}")
    if cfg.n is not None:
        head.append(f"n={cfg.n}")
    head.append(f"seed={cfg.seed}")
    lines = [" ".join(head)]
    for c in rep.checks:
        line = f"{c.status:>4}  {c.name}"
        if c.detail:
            line += f"  [{c.detail}]"
        lines.append(line)
    lines.append(rep.summary())
    return "\n".join(lines) + "\n"


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# dump


def _sorted_entries(op: Operator) -> list:
    return sorted(op.entries(), key=lambda e: (e[0], e[1]))


def _render_dump(cfg: RunConfig, meta: dict, op: Operator) -> str:
    entries = _sorted_entries(op)
    if cfg.format == "json":
        doc = dict(meta)
        doc["shape"] = [op.nrows, op.ncols]
        doc["entries"] = [[r, c, format_scalar(v)] for r, c, v in entries]
        return json.dumps(doc, indent=2) + "\n"
    if cfg.format == "csv":
        lines = ["row,col,value"]
        lines += [f"{r},{c},{format_scalar(v)}" for r, c, v in entries]
        return "\n".join(lines) + "\n"
    head = " ".join(f"{k}={v}" for k, v in meta.items()
                    if k != "params" and v is not None)
    p = meta["params"]
    lines = [f"# {head}",
             f"# params t={p['t']} z={p['z']} eps={p['eps']} mu={p['mu']}",
             f"# shape {op.nrows} x {op.ncols}, {len(entries)} entries"]
    lines += [f"{r} {c} {format_scalar(v)}" for r, c, v in entries]
    return "\n".join(lines) + "\n"


def _render_generators(cfg: RunConfig, meta: dict, named: list) -> str:
    if cfg.format == "json":
        doc = dict(meta)
        doc["generators"] = [
            {"name": name, "shape": [op.nrows, op.ncols],
             "entries": [[r, c, format_scalar(v)]
                         for r, c, v in _sorted_entries(op)]}
            for name, op in named]
        return json.dumps(doc, indent=2) + "\n"
    if cfg.format == "csv":
        lines = ["generator,row,col,value"]
        for name, op in named:
            lines += [f"{name},{r},{c},{format_scalar(v)}"
                      for r, c, v in _sorted_entries(op)]
        return "\n".join(lines) + "\n"
    head = " ".join(f"{k}={v}" for k, v in meta.items()
                    if k != "params" and v is not None)
    p = meta["params"]
    lines = [f"# {head}",
             f"# params t={p['t']} z={p['z']} eps={p['eps']} mu={p['mu']}"]
    for name, op in named:
        entries = _sorted_entries(op)
        lines.append(f"# generator {name}, {len(entries)} entries")
        lines += [f"{r} {c} {format_scalar(v)}" for r, c, v in entries]
    return "\n".join(lines) + "\n"


def cmd_dump(cfg: RunConfig) -> int:
    params = resolved_params(cfg)
    fam = _family(cfg)
    meta = {"target": cfg.target, "family": fam.tag, "n": fam.n,
            "params": _params_dict(params)}
    if cfg.target == "generators":
        gens = generators(fam, params)
        named = []
        for i in range(fam.nprime + 1):
            named.append((f"e{i}", gens.e[i]))
            named.append((f"f{i}", gens.f[i]))
            named.append((f"kplus{i}", gens.kplus[i]))
            named.append((f"kminus{i}", gens.kminus[i]))
        _emit(cfg, _render_generators(cfg, meta, named))
        return 0
    if cfg.target == "hamiltonian":
        spec = _coideal(cfg, fam)
        meta.update(k=spec.k, kp=spec.kp)
        op = hamiltonian(spec, params)
    elif fam.tag == "A1":
        if cfg.k is not None or cfg.kp is not None:
            raise ConfigError("--k/--kp apply only to the bounded families")
        meta.update(k=None, kp=None)
        op = build_ktr(fam.n, params.z, params).operator
    else:
        spec = _coideal(cfg, fam)
        meta.update(k=spec.k, kp=spec.kp)
        op = build_kkk(spec.k, spec.kp, fam.n, params.z, params).operator
    _emit(cfg, _render_dump(cfg, meta, op))
    return 0


# ---------------------------------------------------------------------------
# spectrum


def cmd_spectrum(cfg: RunConfig) -> int:
    start = time.perf_counter()
    params = resolved_params(cfg)
    try:
        reports = _spectral_reports(cfg, params)
    except DegenerateEigenvalues as exc:
        print(f"FAIL: generic spectral sample [{exc}]", file=sys.stderr)
        return 1
    rep = _spectral_checks(reports)
    elapsed_ms = int((time.perf_counter() - start) * 1000)
    if cfg.format == "csv":
        text = spectra_csv(reports)
    elif cfg.format == "json":
        rows = []
        for sr in reports:
            for row in sr.rows:
                rows.append({"n": row.n, "family": row.family, "l": row.l,
                             "j": row.j, "value": format_scalar(row.value),
                             "observed": row.rank, "expected": row.expected,
                             "status": "pass" if row.ok else "fail"})
        checks = [c.to_dict() for sr in reports for c in sr.checks.checks]
        doc = {"suite": "spectrum", "family": cfg.family, "n": cfg.n,
               "params": _params_dict(params), "rows": rows,
               "checks": checks, "elapsed_ms": elapsed_ms}
        text = json.dumps(doc, indent=2) + "\n"
    else:
        text = _render_checks(cfg, rep, params, elapsed_ms)
    _emit(cfg, text)
    return _verdict(rep)


# ---------------------------------------------------------------------------
# entry point


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args)
        if cfg.subcommand == "verify":
            return cmd_verify(cfg)
        if cfg.subcommand == "dump":
            return cmd_dump(cfg)
        return cmd_spectrum(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
