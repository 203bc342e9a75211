"""Batch command line front end.

Every subcommand reads JSON inputs, writes one JSON (or CSV) report and exits
with 0 (ok), 1 (a well-formed but negative answer: not envariant, infeasible,
verification failed, identity out of domain) or 2 (bad input).

Output is deterministic: keys sorted, floats rounded to 12 significant digits,
exact rationals written as ``"p/q"`` strings and big counts as decimal strings.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import canonical, counting, envariance, microcanonical, qstate, thermo

SUBCOMMANDS = ("schmidt", "envariance", "microcanonical", "count", "canonical", "thermo", "mutualinfo")

TOLERANCE_KEYS = {
    "schmidt": {"even"},
    "envariance": {"marginal"},
    "microcanonical": {"shell"},
    "count": set(),
    "canonical": set(),
    "thermo": set(),
    "mutualinfo": {"mixed"},
}

DEFAULT_TOLERANCES = {"even": 1e-9, "marginal": 1e-9, "shell": 1e-9, "mixed": 1e-9}

CSV_HEADERS = {
    "schmidt": ["k", "coefficient", "probability"],
    "count": ["energy", "count"],
    "canonical": ["level", "energy", "n_continuous", "n_argmax", "count"],
}


class InputError(Exception):
    """Bad command line or unreadable input file (exit code 2)."""


class DomainNegative(Exception):
    """Valid input, negative answer (exit code 1). Carries a partial report."""

    def __init__(self, message: str, report: dict | None = None):
        super().__init__(message)
        self.report = report


@dataclass
class RunConfig:
    subcommand: str
    input: Path | None = None
    unitary: Path | None = None
    bath: Path | None = None
    output: Path | None = None
    N: int | None = None
    energy: str | None = None
    system_energy: str | None = None
    dim_env: int | None = None
    split: tuple[int, int] | None = None
    seed: int = 0
    kB: float = 1.0
    format: str = "json"
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise InputError(f"unknown subcommand {self.subcommand!r}")
        allowed = TOLERANCE_KEYS[self.subcommand]
        unknown = set(self.tolerances) - allowed
        if unknown:
            raise InputError(
                f"unknown tolerance key(s) {sorted(unknown)} for {self.subcommand}; allowed: {sorted(allowed)}"
            )
        for k, v in self.tolerances.items():
            if not v > 0:
                raise InputError(f"tolerance {k} must be positive, got {v}")
        if self.format not in ("json", "csv"):
            raise InputError(f"format must be json or csv, not {self.format!r}")
        if self.format == "csv" and self.subcommand not in CSV_HEADERS:
            raise InputError(f"csv output is not available for {self.subcommand}")
        if not self.kB > 0:
            raise InputError("kB must be positive")

    def tol(self, key: str) -> float:
        return self.tolerances.get(key, DEFAULT_TOLERANCES[key])


# -- serialization -----------------------------------------------------------

def _fmt_float(x: float):
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    v = float(f"{x:.12g}")
    return 0.0 if v == 0 else v


def canonicalize(obj):
    """Make a report JSON-safe and byte-stable."""
    if isinstance(obj, dict):
        return {str(k): canonicalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonicalize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [canonicalize(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, complex):
        return {"re": _fmt_float(obj.real), "im": _fmt_float(obj.imag)}
    return obj


def dumps(report: dict) -> str:
    return json.dumps(canonicalize(report), sort_keys=True, indent=2) + "\n"


def csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_csv_cell(c) for c in row])
    return buf.getvalue()


def _csv_cell(c):
    if isinstance(c, (float, np.floating)):
        return _fmt_float(float(c))
    if c is None:
        return ""
    return str(c)


def _load_json(path: Path | None, what: str):
    if path is None:
        raise InputError(f"--{what} is required")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {what} file {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _require(value, flag: str):
    if value is None:
        raise InputError(f"{flag} is required")
    return value


def _energy(cfg: RunConfig, flag: str = "--energy") -> Fraction:
    return microcanonical.to_fraction(_require(cfg.energy, flag))


# -- subcommands -------------------------------------------------------------

def cmd_schmidt(cfg: RunConfig):
    state = qstate.PureState.from_dict(_load_json(cfg.input, "input"))
    dec = qstate.schmidt(state)
    c = dec.coefficients
    even = bool(c.max() - c.min() <= cfg.tol("even"))
    report = {
        "coefficients": c,
        "probabilities": c**2,
        "rank": dec.rank,
        "even": even,
        "maximally_envariant": envariance.is_maximally_envariant(state, cfg.tol("even")),
        "dimS": state.dim_s,
        "dimE": state.dim_e,
    }
    rows = [[k, float(a), float(a * a)] for k, a in enumerate(c)]
    return report, rows


def cmd_envariance(cfg: RunConfig):
    state = qstate.PureState.from_dict(_load_json(cfg.input, "input"))
    u = qstate.UnitaryOp.from_dict(_load_json(cfg.unitary, "unitary"))
    verdict = envariance.is_envariant(state, u, cfg.tol("marginal"))
    report = verdict.to_dict(include_witness=True)
    if not verdict.envariant:
        raise DomainNegative("not envariant", report)
    return report, None


def cmd_microcanonical(cfg: RunConfig):
    h = microcanonical.Hamiltonian.from_dict(_load_json(cfg.input, "input"))
    e = _energy(cfg)
    z = microcanonical.degenerate_shell(h, e, cfg.tol("shell")).shape[1]
    dim_e = cfg.dim_env if cfg.dim_env is not None else max(z, 1)
    try:
        mc = microcanonical.build_microcanonical(h, e, dim_e, cfg.seed)
    except microcanonical.EmptyShellError as exc:
        raise DomainNegative(f"empty shell: {exc}") from exc
    rep = microcanonical.verify_microcanonical(mc.state, h, cfg.tol("shell"), seed=cfg.seed)
    report = {
        "Z": mc.Z,
        "shell_energy": mc.shell_energy,
        "phases": mc.phases,
        "internal_energy": microcanonical.internal_energy(mc.state, h),
        "state": mc.state.to_dict(),
        "verification": rep.to_dict(),
    }
    if not rep.verdict:
        raise DomainNegative("verification failed", report)
    return report, None


def _bath(cfg: RunConfig) -> counting.BathSpec:
    return counting.BathSpec.from_dict(_load_json(cfg.bath, "bath"), N=cfg.N)


def cmd_count(cfg: RunConfig):
    bath = _bath(cfg)
    table = counting.degeneracy_table(bath)
    rows = [[e, str(c)] for e, c in sorted(table.items())]
    report = {"N": bath.N, "levels": bath.unit.to_dict()["levels"], "total": str(sum(table.values()))}
    if cfg.energy is not None:
        e = _energy(cfg)
        report["E_B"] = e
        report["count"] = str(counting.bath_degeneracy(bath, e))
        report["log_count"] = thermo.boltzmann_entropy(table[e], 1.0) if e in table else None
    else:
        report["table"] = {str(e): c for e, c in rows}
    return report, rows


def cmd_canonical(cfg: RunConfig):
    bath = _bath(cfg)
    e_b = _energy(cfg)
    try:
        sol = canonical.solve_boltzmann_gibbs(bath.unit, bath.N, e_b)
    except canonical.InfeasibleError as exc:
        raise DomainNegative(str(exc)) from exc
    report = {"N": bath.N, "E_B": e_b, **sol.to_dict(), "minus_lambda": -sol.lam}

    try:
        am = canonical.argmax_occupation(bath, e_b)
        n_argmax = list(am.occupation)
        report["argmax"] = {"occupation": n_argmax, "count": str(am.count), "tied": am.tied, "n_feasible": am.n_feasible}
    except counting.GuardExceeded:
        n_argmax = [None] * bath.unit.m
        report["argmax"] = None

    tagged = counting.tagged_unit_counts(bath, e_b)
    total = sum(tagged)
    report["exact"] = {
        "total_count": str(total),
        "level_counts": [str(c) for c in tagged],
        "n_exact": [bath.N * c / total for c in tagged] if total else None,
    }
    try:
        report["inverse_temperature"] = thermo.bath_inverse_temperature(bath, e_b, cfg.kB).beta
    except qstate.ValidationError:
        report["inverse_temperature"] = None

    rows = [
        [j, lv.energy, float(n), n_argmax[j], str(tagged[j])]
        for j, (lv, n) in enumerate(zip(bath.unit.levels, sol.occupations))
    ]
    return report, rows


def cmd_thermo(cfg: RunConfig):
    bath = _bath(cfg)
    e_b = _energy(cfg)
    bt = thermo.bath_inverse_temperature(bath, e_b, cfg.kB)
    count = counting.count_from_occupations(bath, e_b)
    report = {
        "N": bath.N,
        "E_B": e_b,
        "kB": cfg.kB,
        "count": str(count),
        "entropy_B": thermo.boltzmann_entropy(count, cfg.kB),
        "inverse_temperature": bt.beta,
        "temperature": bt.temperature,
        "neighbours": [bt.lower, bt.upper],
    }
    try:
        report["minus_lambda"] = -canonical.solve_boltzmann_gibbs(bath.unit, bath.N, e_b).lam
    except canonical.InfeasibleError:
        report["minus_lambda"] = None
    if cfg.input is not None:
        system = counting.Spectrum.from_dict(_load_json(cfg.input, "input"))
        e_s = microcanonical.to_fraction(cfg.system_energy) if cfg.system_energy is not None else None
        try:
            report["system"] = thermo.thermo_report(system, bath, e_b, e_s, cfg.kB).to_dict()
        except thermo.DomainError as exc:
            raise DomainNegative(str(exc), report) from exc
    return report, None


def cmd_mutualinfo(cfg: RunConfig):
    state = qstate.PureState.from_dict(_load_json(cfg.input, "input"))
    rho_s = qstate.reduced_matrix(state, "S")
    report = {
        "D": qstate.mutual_information(state),
        "entropy_S": qstate.von_neumann_entropy(rho_s),
        "entropy_E": qstate.von_neumann_entropy(qstate.reduced_matrix(state, "E")),
    }
    if cfg.split is None:
        counts = (thermo.support_count(rho_s), thermo.support_count(qstate.reduced_matrix(state, "E")), 1)
    else:
        a, b = cfg.split
        rho_a, rho_b = qstate.split_reduced(rho_s, a, b)
        report["split"] = [a, b]
        report["D_split"] = qstate.internal_mutual_information(state, a, b)
        counts = (thermo.support_count(rho_a), thermo.support_count(rho_b), thermo.support_count(rho_s))
    report["counts"] = {"S": str(counts[0]), "B": str(counts[1]), "joint": str(counts[2])}
    try:
        mi = thermo.mutual_info_identity_check(state, *counts, split=cfg.split, tol=cfg.tol("mixed"))
    except thermo.DomainError as exc:
        report["identity"] = None
        raise DomainNegative(f"identity out of domain: {exc}", report) from exc
    report["identity"] = mi.to_dict()
    return report, None


COMMANDS = {
    "schmidt": cmd_schmidt,
    "envariance": cmd_envariance,
    "microcanonical": cmd_microcanonical,
    "count": cmd_count,
    "canonical": cmd_canonical,
    "thermo": cmd_thermo,
    "mutualinfo": cmd_mutualinfo,
}


# -- argument parsing --------------------------------------------------------

def _tolerance(text: str) -> tuple[str, float]:
    key, sep, val = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected KEY=VAL, got {text!r}")
    try:
        return key.strip(), float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance value must be a number, got {val!r}") from None


def _split(text: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A,B with two integers, got {text!r}") from None
    return a, b


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--output", type=Path, help="write the report here instead of stdout")
    common.add_argument("--format", default="json", help="json (default) or csv")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--kB", type=float, default=1.0)
    common.add_argument("--tolerance", type=_tolerance, action="append", default=[], metavar="KEY=VAL")

    parser = _Parser(prog="envstat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("schmidt", parents=[common], help="Schmidt coefficients of a state")
    p.add_argument("--input", type=Path, required=True)

    p = sub.add_parser("envariance", parents=[common], help="decide envariance of a system unitary")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--unitary", type=Path, required=True)

    p = sub.add_parser("microcanonical", parents=[common], help="build and verify a microcanonical state")
    p.add_argument("--input", type=Path, required=True, help="Hamiltonian JSON")
    p.add_argument("--energy", required=True)
    p.add_argument("--dim-env", dest="dim_env", type=int)

    p = sub.add_parser("count", parents=[common], help="exact bath degeneracies")
    p.add_argument("--bath", type=Path, required=True)
    p.add_argument("--N", type=int)
    p.add_argument("--energy")

    p = sub.add_parser("canonical", parents=[common], help="Boltzmann-Gibbs occupations")
    p.add_argument("--bath", type=Path, required=True)
    p.add_argument("--N", type=int)
    p.add_argument("--energy", required=True)

    p = sub.add_parser("thermo", parents=[common], help="bath temperature and canonical weights")
    p.add_argument("--bath", type=Path, required=True)
    p.add_argument("--N", type=int)
    p.add_argument("--energy", required=True)
    p.add_argument("--input", type=Path, help="system spectrum JSON (optional)")
    p.add_argument("--system-energy", dest="system_energy")

    p = sub.add_parser("mutualinfo", parents=[common], help="mutual information and count identity")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--split", type=_split, help="read the system side as A,B")
    return parser


def parse_config(argv: list[str] | None = None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    ns["tolerances"] = dict(ns.pop("tolerance"))
    return RunConfig(**ns)


def _emit(cfg: RunConfig, report, rows) -> None:
    if cfg.format == "csv":
        text = csv_text(CSV_HEADERS[cfg.subcommand], rows or [])
    else:
        text = dumps(report)
    if cfg.output is not None:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)


def run(argv: list[str] | None = None) -> int:
    try:
        cfg = parse_config(argv)
        report, rows = COMMANDS[cfg.subcommand](cfg)
    except DomainNegative as exc:
        print(f"envstat: {exc}", file=sys.stderr)
        if exc.report is not None and cfg.format == "json":
            _emit(cfg, {**exc.report, "error": str(exc)}, None)
        return 1
    except (InputError, qstate.ValidationError, KeyError, TypeError, ValueError) as exc:
        print(f"envstat: error: {exc}", file=sys.stderr)
        return 2
    _emit(cfg, report, rows)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
