"""Command-line entry point: ``nullwidth <subcommand> ...``.

Exit codes: 0 success, 2 verification failure, 3 infeasible input, 4 usage error.
Artifacts are written atomically and embed the run configuration.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .complexes import Cochain, SimplicialComplex, boundary_sphere_complex, edgewise_subdivide

FORMAT_VERSION = 1
EXIT_OK, EXIT_VERIFY, EXIT_INFEASIBLE, EXIT_USAGE = 0, 2, 3, 4


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Everything needed to replay a run."""

    subcommand: str
    inputs: dict = field(default_factory=dict)
    output: str | None = None
    L: list = field(default_factory=list)
    seeds: int = 1
    seed: int = 0
    T_const: str = "1"
    oracle: bool = False
    jobs: int = 1
    verbosity: int = 0
    options: dict = field(default_factory=dict)

    def to_json(self):
        d = asdict(self)
        d.pop("verbosity")
        return d


def _fmt(v):
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


def atomic_write(path, text):
    """Write via a temporary file in the target directory and rename."""
    folder = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(prefix=".nullwidth-", dir=folder)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(obj):
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def _emit(cfg: RunConfig, payload: dict):
    payload = dict(payload)
    payload["run_config"] = cfg.to_json()
    payload["format_version"] = FORMAT_VERSION
    text = dump_json(payload)
    if cfg.output:
        atomic_write(cfg.output, text)
    else:
        sys.stdout.write(text)


def _load(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _load_complex(path):
    data = _load(path)
    return SimplicialComplex.from_json(data.get("complex", data))


def _load_cochain(path, host):
    data = _load(path)
    return Cochain.from_json(host, data.get("cochain", data))


def _parse_L(text):
    try:
        out = [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad L list {text!r}") from None
    if not out or any(v < 1 for v in out):
        raise UsageError("L values must be positive integers")
    return out


# -- subcommands ----------------------------------------------------------------

def cmd_subdivide(cfg):
    o = cfg.options
    if cfg.inputs.get("complex"):
        X = _load_complex(cfg.inputs["complex"])
    else:
        X = boundary_sphere_complex(o["sphere_dim"])
    Y = edgewise_subdivide(X, cfg.L[0])
    _emit(cfg, {"complex": Y.to_json(), "counts": [Y.count(k) for k in range(Y.dim + 1)]})
    return EXIT_OK


def cmd_fill(cfg):
    from .fill import Infeasible, fill_linf_integral, fill_linf_real, ilp_fill_oracle

    X = _load_complex(cfg.inputs["complex"])
    w = _load_cochain(cfg.inputs["cochain"], X)
    ring = cfg.options.get("ring", "Q")
    try:
        res = fill_linf_integral(w) if ring == "Z" else fill_linf_real(w)
    except Infeasible as exc:
        sys.stderr.write(f"infeasible: {exc}\n")
        return EXIT_INFEASIBLE
    payload = {"result": res.to_json()}
    status = EXIT_OK
    if cfg.oracle:
        if ring == "Z":
            box = max(1, int(res.norm) + 1)
            ref = ilp_fill_oracle(w, box)
        else:
            ref = fill_linf_real(w, method="simplex")
        agree = ref.norm == res.norm
        payload["oracle"] = {"norm": _fmt(ref.norm), "agrees": agree}
        if not agree:
            sys.stderr.write(f"oracle disagrees: {ref.norm} vs {res.norm}\n")
            status = EXIT_VERIFY
    _emit(cfg, payload)
    return status


def cmd_hopf(cfg):
    from .hopf import (SimplicialMapData, hopf_cup, hopf_linking_oracle, simplicial_hopf_map,
                       whitney_helicity)

    o = cfg.options
    payload = {}
    f = None
    if o.get("make_map") is not None:
        f = simplicial_hopf_map(o["make_map"], o.get("polygon", 6), cfg.L[0] if cfg.L else 2)
        payload["map"] = f.to_json()
    elif cfg.inputs.get("map"):
        f = SimplicialMapData.from_json(_load(cfg.inputs["map"]))
    if f is not None:
        w = f.degree_cochain()
    else:
        if not (cfg.inputs.get("complex") and cfg.inputs.get("cochain")):
            raise UsageError("hopf needs --complex and --cochain, or --map, or --make-map")
        X = _load_complex(cfg.inputs["complex"])
        w = _load_cochain(cfg.inputs["cochain"], X)
    try:
        h = hopf_cup(w)
    except ValueError as exc:
        sys.stderr.write(f"infeasible: {exc}\n")
        return EXIT_INFEASIBLE
    payload["hopf_cup"] = _fmt(h)
    payload["whitney_helicity"] = _fmt(whitney_helicity(w))
    status = EXIT_OK
    if cfg.oracle:
        if f is None and cfg.inputs.get("oracle_map"):
            f = SimplicialMapData.from_json(_load(cfg.inputs["oracle_map"]))
        if f is None:
            raise UsageError("--oracle needs a simplicial map (--map, --make-map or --oracle-map)")
        lk = hopf_linking_oracle(f)
        payload["linking_oracle"] = _fmt(lk)
        payload["agrees"] = lk == h
        if lk != h:
            status = EXIT_VERIFY
    _emit(cfg, payload)
    return status


def cmd_certify(cfg):
    from .certify import GenerationExhausted, NotNullhomotopic, build_certificate, generate_instance

    L = cfg.L[0]
    try:
        m = generate_instance(L, cfg.seed, strategy=cfg.options.get("strategy", "hopf-repair"))
        cert = build_certificate(m, T=cfg.options.get("T"), T_const=Fraction(cfg.T_const))
    except (NotNullhomotopic, GenerationExhausted) as exc:
        sys.stderr.write(f"infeasible: {exc}\n")
        return EXIT_INFEASIBLE
    data = cert.to_json()
    data["config"] = cfg.to_json()
    data["run_config"] = cfg.to_json()
    text = dump_json(data)
    if cfg.output:
        atomic_write(cfg.output, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(cfg):
    from .certify import Certificate, verify_certificate

    try:
        cert = Certificate.from_json(_load(cfg.inputs["certificate"]))
    except (KeyError, ValueError) as exc:
        raise UsageError(f"cannot read certificate: {exc}") from None
    rep = verify_certificate(cert)
    out = rep.to_json()
    out.pop("seconds", None)
    if cfg.output:
        _emit(cfg, {"report": out})
    for name in rep.failed:
        sys.stderr.write(f"FAIL {name}: {rep.details.get(name, '')}\n")
    if cfg.verbosity or not cfg.output:
        sys.stdout.write(("PASS" if rep.passed else "FAIL") + f" {len(rep.checks)} identities\n")
    return EXIT_OK if rep.passed else EXIT_VERIFY


def study_csv(rows, with_runtime=True):
    from .certify import CSV_COLUMNS

    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(CSV_COLUMNS + ["seed", "error"])
    for r in sorted(rows, key=lambda r: (r["L"], r["seed"])):
        line = []
        for c in CSV_COLUMNS:
            v = r.get(c, "")
            if c == "runtime_s" and not with_runtime:
                v = 0
            if c not in ("L", "T", "runtime_s") and v != "":
                v = _fmt(v)
            line.append(v)
        wr.writerow(line + [r["seed"], r.get("error", "")])
    return buf.getvalue()


def cmd_scale_study(cfg):
    from .certify import scale_study

    log = None
    if cfg.verbosity:
        log = lambda r: sys.stderr.write(f"L={r['L']} seed={r['seed']} {r.get('error') or 'ok'} {r['runtime_s']}s\n")
    rows = scale_study(cfg.L, cfg.seeds, T_const=Fraction(cfg.T_const), base_seed=cfg.seed,
                       verify=cfg.oracle, jobs=cfg.jobs, log=log)
    text = study_csv(rows, with_runtime=not cfg.options.get("no_runtime"))
    if cfg.output:
        atomic_write(cfg.output, text)
    else:
        sys.stdout.write(text)
    return EXIT_VERIFY if any(r.get("error") for r in rows) else EXIT_OK


def cmd_dga_check(cfg):
    from .dga import (ParseError, TwoStageViolation, build_two_stage_nullhomotopy, homotopy_from_json,
                      model_from_json, verify_homotopy, zero_morphism)

    try:
        model = model_from_json(_load(cfg.inputs["model"]))
        if cfg.inputs.get("homotopy"):
            h, f0, f1, _ = homotopy_from_json(model, _load(cfg.inputs["homotopy"]))
        else:
            h, f0, target = build_two_stage_nullhomotopy(model, check=False)
            f1 = zero_morphism(model, target)
    except (ParseError, KeyError) as exc:
        raise UsageError(f"bad model or homotopy: {exc}") from None
    except TwoStageViolation as exc:
        sys.stderr.write(f"infeasible: {exc}\n")
        return EXIT_INFEASIBLE
    rep = verify_homotopy(h, f0, f1)
    payload = {"report": rep.to_json(), "homotopy": h.to_json(), "target": h.target.to_json()}
    _emit(cfg, payload)
    for line in rep.failures():
        sys.stderr.write(line + "\n")
    return EXIT_OK if rep.passed else EXIT_VERIFY


COMMANDS = {
    "subdivide": cmd_subdivide,
    "fill": cmd_fill,
    "hopf": cmd_hopf,
    "certify": cmd_certify,
    "verify": cmd_verify,
    "scale-study": cmd_scale_study,
    "dga-check": cmd_dga_check,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="nullwidth", description="Exact combinatorial nullhomotopies for maps to S^2.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    p.add_argument("--jobs", type=int, default=1, help="worker processes for scale studies")
    sub = p.add_subparsers(dest="subcommand", parser_class=_Parser)

    s = sub.add_parser("subdivide", help="edgewise subdivision of a complex")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--complex")
    g.add_argument("--sphere-dim", type=int, default=3, help="boundary of the (n+1)-simplex")
    s.add_argument("--L", required=True)
    s.add_argument("--out")

    s = sub.add_parser("fill", help="l-infinity optimal filler of a cochain")
    s.add_argument("--complex", required=True)
    s.add_argument("--cochain", required=True)
    s.add_argument("--ring", choices=("Z", "Q"), default="Q")
    s.add_argument("--oracle", action="store_true", help="cross-check with the exact dense solver")
    s.add_argument("--out")

    s = sub.add_parser("hopf", help="Hopf invariant of a degree cochain or simplicial map")
    s.add_argument("--complex")
    s.add_argument("--cochain")
    s.add_argument("--map", help="simplicial map JSON")
    s.add_argument("--make-map", type=int, metavar="D", help="generate the degree-D Hopf map")
    s.add_argument("--polygon", type=int, default=6)
    s.add_argument("--L", default="2")
    s.add_argument("--oracle", nargs="?", const=True, default=False, metavar="MAP",
                   help="compare with the linking-number oracle (optionally on MAP)")
    s.add_argument("--out")

    s = sub.add_parser("certify", help="build a nullhomotopy certificate")
    s.add_argument("--L", required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--T-const", default="1")
    s.add_argument("--T", type=int)
    s.add_argument("--strategy", choices=("hopf-repair", "coboundary-sample"), default="hopf-repair")
    s.add_argument("--out")

    s = sub.add_parser("verify", help="re-check every identity of a certificate")
    s.add_argument("certificate")
    s.add_argument("--out")

    s = sub.add_parser("scale-study", help="norm table over L and seeds (CSV)")
    s.add_argument("--L", required=True)
    s.add_argument("--seeds", type=int, default=10)
    s.add_argument("--seed", type=int, default=0, help="first seed")
    s.add_argument("--T-const", default="1")
    s.add_argument("--verify", action="store_true")
    s.add_argument("--no-runtime", action="store_true", help="write 0 in the runtime column")
    s.add_argument("--csv")

    s = sub.add_parser("dga-check", help="verify a DGA homotopy symbolically")
    s.add_argument("--model", required=True)
    s.add_argument("--homotopy")
    s.add_argument("--out")
    return p


def config_from_args(args) -> RunConfig:
    cmd = args.subcommand
    cfg = RunConfig(subcommand=cmd, jobs=max(1, args.jobs), verbosity=args.verbose)
    if cmd == "subdivide":
        cfg.inputs = {"complex": args.complex}
        cfg.L = _parse_L(args.L)
        cfg.options = {"sphere_dim": args.sphere_dim}
        cfg.output = args.out
    elif cmd == "fill":
        cfg.inputs = {"complex": args.complex, "cochain": args.cochain}
        cfg.options = {"ring": args.ring}
        cfg.oracle = args.oracle
        cfg.output = args.out
    elif cmd == "hopf":
        cfg.inputs = {"complex": args.complex, "cochain": args.cochain, "map": args.map}
        if isinstance(args.oracle, str):
            cfg.inputs["oracle_map"] = args.oracle
        cfg.oracle = bool(args.oracle)
        cfg.L = _parse_L(args.L)
        cfg.options = {"make_map": args.make_map, "polygon": args.polygon}
        cfg.output = args.out
    elif cmd == "certify":
        cfg.L = _parse_L(args.L)
        cfg.seed = args.seed
        cfg.T_const = str(Fraction(args.T_const))
        cfg.options = {"strategy": args.strategy, "T": args.T}
        cfg.output = args.out
    elif cmd == "verify":
        cfg.inputs = {"certificate": args.certificate}
        cfg.output = args.out
    elif cmd == "scale-study":
        cfg.L = _parse_L(args.L)
        cfg.seeds = args.seeds
        cfg.seed = args.seed
        cfg.T_const = str(Fraction(args.T_const))
        cfg.oracle = args.verify
        cfg.options = {"no_runtime": args.no_runtime}
        cfg.output = args.csv
    elif cmd == "dga-check":
        cfg.inputs = {"model": args.model, "homotopy": args.homotopy}
        cfg.output = args.out
    return cfg


def run(cfg: RunConfig) -> int:
    if cfg.subcommand not in COMMANDS:
        raise UsageError(f"unknown subcommand {cfg.subcommand!r}")
    return COMMANDS[cfg.subcommand](cfg)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if not args.subcommand:
            raise UsageError("a subcommand is required")
        return run(config_from_args(args))
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except ValueError as exc:
        sys.stderr.write(f"infeasible: {exc}\n")
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
