"""Command-line front end: residue tables, suspension cross-checks, cocycle values and the campaign.

Exit codes are 0 when every record passes, 1 when a verification record
fails and 2 for usage, configuration or parse errors.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import os
import re
import sys
import time
from dataclasses import asdict, dataclass, field
from math import pi
from typing import Sequence

import numpy as np

from . import __version__
from . import cocycle as cc
from .errors import ConfigError, FitError, PreconditionError, QdsError
from .models import build_model, nctorus_closed_values, sphere_form_integral
from .models.base import ModelInstance
from .operators import Op, ell2
from .qds import SuspElem, SuspendedTriple, suspend_triple
from .residues import zeta_residue
from .verify import SPHERE_PHI2_CONSTANT, CampaignConfig, Record, run_checks

SCHEMA = 1
MODELS = ("circle", "torus", "sphere")
ENV_CONFIG = "QDSINDEX_CONFIG"


class UsageError(QdsError, ValueError):
    """Malformed command-line input such as a bad tuple spec."""


@dataclass
class RunConfig:
    """Everything needed to reproduce a run; echoed into every report."""

    model: str = "torus"
    Lambda: int | None = None
    lmax: int | None = None
    theta: float | None = None
    M: int = 40
    fit_points: int | None = None
    fit_ratio: float | None = None
    fit_R: int | None = None
    eps_tail: float | None = None
    tolerances: dict[str, float] = field(default_factory=dict)
    output: str | None = None
    format: str = "json"

    def validate(self) -> None:
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; expected one of {', '.join(MODELS)}")
        if self.M < 2:
            raise ConfigError("suspension size M must be at least 2")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        for key, val in self.tolerances.items():
            if not val > 0:
                raise ConfigError(f"tolerance {key} must be positive")
        if self.fit_points is not None and self.fit_points < 4:
            raise ConfigError("fit points must be at least 4")
        if self.eps_tail is not None and not 0 < self.eps_tail < 1:
            raise ConfigError("eps_tail must lie in (0, 1)")

    def fit_overrides(self) -> dict:
        out = {}
        if self.fit_points is not None:
            out["points"] = self.fit_points
        if self.fit_ratio is not None:
            out["ratio"] = self.fit_ratio
        if self.fit_R is not None:
            out["R"] = self.fit_R
        if self.eps_tail is not None:
            out["eps_tail"] = self.eps_tail
        return out

    def campaign(self) -> CampaignConfig:
        c = CampaignConfig(M=self.M, theta=self.theta, fit=self.fit_overrides(), tolerances=dict(self.tolerances))
        if self.Lambda is not None:
            c.torus_lambda = self.Lambda
            c.circle_lambda = self.Lambda
        if self.lmax is not None:
            c.sphere_lmax = self.lmax
        return c

    def to_json(self) -> dict:
        return asdict(self)

    # -- INI round trip ----------------------------------------------------

    def to_ini(self) -> str:
        cp = configparser.ConfigParser()
        cp.optionxform = str
        cp["model"] = {"name": self.model, "suspension_size": str(self.M)}
        for key, val in (("lambda", self.Lambda), ("lmax", self.lmax), ("theta", self.theta)):
            if val is not None:
                cp["model"][key] = repr(val)
        cp["fit"] = {}
        for key, val in (("points", self.fit_points), ("ratio", self.fit_ratio), ("R", self.fit_R), ("eps_tail", self.eps_tail)):
            if val is not None:
                cp["fit"][key] = repr(val)
        cp["tolerances"] = {k: repr(v) for k, v in sorted(self.tolerances.items())}
        cp["output"] = {"format": self.format}
        if self.output:
            cp["output"]["path"] = self.output
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_ini(cls, text: str, base: "RunConfig | None" = None) -> "RunConfig":
        cp = configparser.ConfigParser()
        cp.optionxform = str
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse config file: {exc}") from None
        cfg = RunConfig(**asdict(base)) if base is not None else RunConfig()
        try:
            if cp.has_section("model"):
                s = cp["model"]
                cfg.model = s.get("name", cfg.model)
                cfg.M = s.getint("suspension_size", cfg.M)
                if "lambda" in s:
                    cfg.Lambda = s.getint("lambda")
                if "lmax" in s:
                    cfg.lmax = s.getint("lmax")
                if "theta" in s:
                    cfg.theta = s.getfloat("theta")
            if cp.has_section("fit"):
                s = cp["fit"]
                if "points" in s:
                    cfg.fit_points = s.getint("points")
                if "ratio" in s:
                    cfg.fit_ratio = s.getfloat("ratio")
                if "R" in s:
                    cfg.fit_R = s.getint("R")
                if "eps_tail" in s:
                    cfg.eps_tail = s.getfloat("eps_tail")
            if cp.has_section("tolerances"):
                cfg.tolerances.update({k: float(v) for k, v in cp["tolerances"].items()})
            if cp.has_section("output"):
                s = cp["output"]
                cfg.format = s.get("format", cfg.format)
                cfg.output = s.get("path", cfg.output)
        except ValueError as exc:
            raise ConfigError(f"bad value in config file: {exc}") from None
        return cfg


# ---------------------------------------------------------------------------
# reports


def build_report(command: str, cfg: RunConfig, records: Sequence[Record], extra: dict | None = None) -> dict:
    records = sorted(records, key=lambda r: r.name)
    passed = sum(r.passed for r in records)
    out = {
        "schema": SCHEMA,
        "version": __version__,
        "command": command,
        "config": cfg.to_json(),
        "summary": {"total": len(records), "passed": passed, "failed": len(records) - passed},
        "records": [r.to_json() for r in records],
    }
    if extra:
        out.update(extra)
    return out


def report_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "expected_re", "expected_im", "computed_re", "computed_im", "abs_error", "tolerance", "pass", "provenance", "runtime_ms"])
    for r in report["records"]:
        exp = r["expected"] or {"re": "", "im": ""}
        w.writerow([
            r["name"], exp["re"], exp["im"], r["computed"]["re"], r["computed"]["im"],
            r["abs_error"], r["tolerance"], int(r["pass"]), r["provenance"], r["runtime_ms"],
        ])
    return buf.getvalue()


def emit(report: dict, cfg: RunConfig) -> None:
    text = report_csv(report) if cfg.format == "csv" else json.dumps(report, indent=2) + "\n"
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _exit_code(report: dict) -> int:
    return 0 if report["summary"]["failed"] == 0 else 1


# ---------------------------------------------------------------------------
# residues


def _model(cfg: RunConfig) -> ModelInstance:
    camp = cfg.campaign()
    if cfg.model == "torus":
        m = build_model("torus", Lambda=camp.torus_lambda, theta=cfg.theta)
    elif cfg.model == "sphere":
        m = build_model("sphere", lmax=camp.sphere_lmax)
    else:
        m = build_model("circle", Lambda=camp.circle_lambda)
    if camp.fit:
        m.fit = m.fit.with_(**camp.fit)
    return m


def _residue_rows(m: ModelInstance) -> list[tuple[str, Op]]:
    rows = [("1", m.identity())]
    if m.even:
        rows.append(("gamma", m.gamma()))
    rows += [(label, op) for label, op in m.generators.items()]
    if m.even:
        rows += [(f"gamma*{label}", m.gamma() @ op) for label, op in m.generators.items()]
    return rows


def _residue_expectation(m: ModelInstance, label: str, order: int) -> complex | None:
    if label.startswith("gamma"):
        # the grading has no residues on the even models
        return 0j
    if m.name == "torus" and label == "1":
        return 2 * pi if order == 2 else 0j
    if m.name == "sphere" and label == "1":
        return {1: 0j, 2: 2.0 + 0j}.get(order)
    if m.name == "circle" and label == "1":
        return 1.0 + 0j
    return None


def cmd_residues(cfg: RunConfig) -> tuple[dict, int]:
    m = _model(cfg)
    tol = cfg.tolerances.get("residues", 1e-6)
    recs: list[Record] = []
    for label, op in _residue_rows(m):
        for order in range(1, m.p + 1):
            t0 = time.perf_counter()
            rep = zeta_residue(op, m.D, order, m.growth, m.fit)
            ms = 1e3 * (time.perf_counter() - t0)
            exp = _residue_expectation(m, label, order)
            name = f"residues.{m.name}.{label}.m{order}"
            if exp is None:
                recs.append(Record(name, rep.value, rep.value, 0.0, rep.error_budget, "computed", ms, "no closed form"))
            else:
                allowed = max(tol, rep.error_budget)
                recs.append(Record(name, exp, rep.value, float(abs(rep.value - exp)), allowed, "derived", ms))
    report = build_report("residues", cfg, recs)
    return report, _exit_code(report)


# ---------------------------------------------------------------------------
# suspension and campaign


def cmd_suspend(cfg: RunConfig) -> tuple[dict, int]:
    group = f"{cfg.model}.transfer"
    recs = run_checks(cfg.campaign(), groups=[group])
    report = build_report("suspend", cfg, recs)
    return report, _exit_code(report)


def cmd_verify(cfg: RunConfig, only: str | None = None) -> tuple[dict, int]:
    recs = run_checks(cfg.campaign(), only=only)
    report = build_report("verify", cfg, recs, {"only": only})
    return report, _exit_code(report)


# ---------------------------------------------------------------------------
# cocycle tuple specs
#
#   tuple   := element (";" element)*
#   element := "S^" int | base ["|" ell]
#   base    := factor ("*" factor)*        factor := name ["^" int] | "1"
#   ell     := "p" | "1" | "S^" int | "e" int "," int
#
# ``z|p`` is z (x) |e_0><e_0|, ``S^2`` is 1 (x) S^2 and ``e1,2`` is |e_1><e_2|.

_INT = r"[+-]?\d+"


def _base_factor(m: ModelInstance, tok: str) -> Op:
    mt = re.fullmatch(rf"([A-Za-z_]\w*|1)(?:\^({_INT}))?", tok)
    if not mt:
        raise UsageError(f"cannot parse factor {tok!r}")
    name, power = mt.group(1), int(mt.group(2) or 1)
    if name == "1":
        return m.identity()
    if name == "gamma" and m.even:
        op = m.gamma()
    elif name in m.generators:
        op = m.generators[name]
    else:
        raise UsageError(f"model {m.name!r} has no element {name!r}")
    if power < 0:
        op, power = op.H, -power
    out = m.identity()
    for _ in range(power):
        out = out @ op
    return out


def _ell_factor(tok: str, M: int) -> tuple[str, Op | int]:
    if tok == "1":
        return "unit", 0
    mt = re.fullmatch(rf"S\^({_INT})", tok)
    if mt:
        return "shift", int(mt.group(1))
    A = np.zeros((M, M), dtype=np.complex128)
    if tok == "p":
        A[0, 0] = 1.0
        return "schwartz", Op(ell2(M), A)
    mt = re.fullmatch(r"e(\d+),(\d+)", tok)
    if mt:
        i, j = int(mt.group(1)), int(mt.group(2))
        if max(i, j) >= M:
            raise UsageError(f"{tok!r} lies outside the truncation M = {M}")
        A[i, j] = 1.0
        return "schwartz", Op(ell2(M), A)
    raise UsageError(f"cannot parse l^2 factor {tok!r}")


def parse_element(spec: str, T: SuspendedTriple) -> SuspElem:
    spec = spec.replace(" ", "")
    if not spec:
        raise UsageError("empty element in tuple spec")
    base_txt, sep, ell_txt = spec.partition("|")
    if not sep and base_txt.startswith("S^"):
        base_txt, ell_txt = "1", base_txt
    elif not sep:
        ell_txt = "1"
    kind, val = _ell_factor(ell_txt, T.M)
    a = T.base.identity()
    for tok in base_txt.split("*"):
        a = a @ _base_factor(T.base, tok)
    is_unit = base_txt in ("1",)
    if kind == "shift":
        if not is_unit:
            raise UsageError("shifts can only be paired with the unit of the base algebra")
        try:
            return T.shift(val)
        except PreconditionError as exc:
            raise UsageError(str(exc)) from None
    if kind == "unit":
        if is_unit:
            return T.unit()
        raise UsageError("a base element needs a Schwartz factor (p or e<i>,<j>)")
    return T.ak(a, val)


def parse_tuple(spec: str, T: SuspendedTriple) -> list[SuspElem]:
    parts = [s for s in spec.split(";")]
    if not spec.strip() or any(not s.strip() for s in parts):
        raise UsageError(f"malformed tuple spec {spec!r}")
    return [parse_element(s, T) for s in parts]


def _closed_form(T: SuspendedTriple, spec: str, elems: list[SuspElem]) -> complex | None:
    """Registered closed forms: shift-only tuples over an even base and sphere/torus products with Schwartz factors."""
    n = len(elems) - 1
    if T.even and all(e.kind == "SHIFT" for e in elems):
        # the grading has vanishing residues on the even models
        return 0j
    if n == 0 and T.even:
        return 0j
    if n != 2 or not all(e.kind == "AK" and e.schwartz for e in elems):
        return None
    tr = complex((elems[0].c @ elems[1].c @ elems[2].c).trace())
    labels = [s.replace(" ", "").partition("|")[0] for s in spec.split(";")]
    m = T.base
    if m.name == "sphere" and all(lab in ("x", "y", "z", "1") for lab in labels):
        return SPHERE_PHI2_CONSTANT * tr * sphere_form_integral(*labels)
    if m.name == "torus":
        ab = [_torus_exponents(lab) for lab in labels]
        if all(v is not None for v in ab):
            alpha = tuple(v[0] for v in ab)
            beta = tuple(v[1] for v in ab)
            return nctorus_closed_values("phi2", alpha, beta, m.theta) * tr
    return None


def _torus_exponents(label: str) -> tuple[int, int] | None:
    """``U^a*V^b`` (either factor optional) as ``(a, b)``; anything else is ``None``."""
    a = b = 0
    if label == "1":
        return 0, 0
    toks = label.split("*")
    seen = []
    for tok in toks:
        mt = re.fullmatch(rf"([UV])(?:\^({_INT}))?", tok)
        if not mt:
            return None
        seen.append(mt.group(1))
        if mt.group(1) == "U":
            a += int(mt.group(2) or 1)
        else:
            b += int(mt.group(2) or 1)
    if seen not in (["U"], ["V"], ["U", "V"]):
        return None
    return a, b


def cmd_cocycle(cfg: RunConfig, tuples: Sequence[str]) -> tuple[dict, int]:
    m = _model(cfg)
    T = suspend_triple(m, cfg.M)
    tol = cfg.tolerances.get("cocycle", 0.02)
    recs: list[Record] = []
    for i, spec in enumerate(tuples):
        elems = parse_tuple(spec, T)
        n = len(elems) - 1
        parity = "even" if n % 2 == 0 else "odd"
        if (parity == "even") != T.even:
            raise UsageError(f"tuple {spec!r} has {n + 1} entries; the {m.name} suspension needs an {'odd' if T.even else 'even'} count")
        t0 = time.perf_counter()
        value = cc.assemble_phi(n, parity, T, elems)
        ms = 1e3 * (time.perf_counter() - t0)
        exp = _closed_form(T, spec, elems)
        name = f"cocycle.{m.name}.phi{n}[{i:02d}]"
        if exp is None:
            recs.append(Record(name, value, value, 0.0, 0.0, "computed", ms, spec))
            continue
        allowed = tol * abs(exp) if abs(exp) > 0 else tol * 1e-3
        recs.append(Record(name, exp, value, float(abs(value - exp)), allowed, "closed-form", ms, spec))
    report = build_report("cocycle", cfg, recs)
    return report, _exit_code(report)


# ---------------------------------------------------------------------------
# argument handling


def _tolerance_pair(text: str) -> tuple[str, float]:
    key, sep, val = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected KEY=VAL, got {text!r}")
    try:
        return key, float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance {key!r} is not a number") from None


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"INI config file (default: ${ENV_CONFIG})")
    common.add_argument("--model", choices=MODELS)
    common.add_argument("--lambda", dest="Lambda", type=int, help="spectral cutoff for circle and torus")
    common.add_argument("--lmax", type=int, help="largest angular momentum on the sphere")
    common.add_argument("--theta", type=float, help="torus deformation parameter")
    common.add_argument("--suspension-size", dest="M", type=int, help="truncation size M of l^2(N)")
    common.add_argument("--fit-points", type=int)
    common.add_argument("--fit-ratio", type=float)
    common.add_argument("--eps-tail", type=float)
    common.add_argument("--tolerance", action="append", type=_tolerance_pair, default=[], metavar="KEY=VAL")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"))

    p = argparse.ArgumentParser(prog="qdsindex", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("residues", parents=[common], help="zeta residues of the model generators")
    sub.add_parser("suspend", parents=[common], help="cross-check the transfer formulas on the suspension")
    c = sub.add_parser("cocycle", parents=[common], help="evaluate the suspended cocycle on element tuples")
    c.add_argument("tuples", nargs="+", help='element tuples such as "z|p; x|p; y|p"')
    v = sub.add_parser("verify", parents=[common], help="run the verification campaign")
    v.add_argument("--only", metavar="NAME-GLOB", help="restrict to matching check names")
    return p


def resolve_config(args: argparse.Namespace, environ=None) -> RunConfig:
    """Defaults, then the config file (``--config`` or the env var), then flags."""
    environ = os.environ if environ is None else environ
    cfg = RunConfig()
    path = args.config or environ.get(ENV_CONFIG)
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                cfg = RunConfig.from_ini(fh.read(), cfg)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path!r}: {exc.strerror}") from None
    for attr, flag in (
        ("model", "model"), ("Lambda", "Lambda"), ("lmax", "lmax"), ("theta", "theta"), ("M", "M"),
        ("fit_points", "fit_points"), ("fit_ratio", "fit_ratio"), ("eps_tail", "eps_tail"),
        ("output", "output"), ("format", "format"),
    ):
        val = getattr(args, flag, None)
        if val is not None:
            setattr(cfg, attr, val)
    cfg.tolerances.update(dict(args.tolerance))
    cfg.validate()
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(args)
        if args.command == "residues":
            report, code = cmd_residues(cfg)
        elif args.command == "suspend":
            report, code = cmd_suspend(cfg)
        elif args.command == "cocycle":
            report, code = cmd_cocycle(cfg, args.tuples)
        else:
            report, code = cmd_verify(cfg, args.only)
    except (ConfigError, UsageError, PreconditionError, FitError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"qdsindex: error: {msg}", file=sys.stderr)
        return 2
    emit(report, cfg)
    if code == 1:
        for r in report["records"]:
            if not r["pass"]:
                print(f"FAIL {r['name']}: abs_error={r['abs_error']:.3e} tolerance={r['tolerance']:.3e}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
