"""Command-line front end.

Subcommands: ``entropy``, ``build-code``, ``encode``, ``verify``,
``sweep-t`` and ``block-limit``. Exit codes: 0 ok, 1 verification failure,
2 usage error, 3 missing input file, 4 malformed input, 5 numerical error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from qlossless import verify
from qlossless.codes import ClassicalCode
from qlossless.entropy import entropy_of_order, von_neumann
from qlossless.errors import DensityError, NoConvergence, QLosslessError
from qlossless.linalg import DensityOperator, matrix_from_json, matrix_to_json, validate_density
from qlossless.qcode import (
    base_length,
    build_encoder,
    encode,
    ensemble_from_json,
    source_base_length,
    source_t_avg_length,
    t_codeword_length,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_NO_FILE = 3
EXIT_MALFORMED = 4
EXIT_NUMERIC = 5

SUBCOMMANDS = ("entropy", "build-code", "encode", "verify", "sweep-t", "block-limit")
DEFAULT_ALPHAS = (0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 4.0)
DEFAULT_SWEEP_TS = (0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, math.inf)

_SPECTRUM_RE = re.compile(r"^\s*[-+0-9.eE]+(\s*,\s*[-+0-9.eE]+)*\s*$")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass
class CliConfig:
    subcommand: str
    input_path: str | None = None
    k: int | None = None
    t: list[float] | None = None
    alpha: list[float] | None = None
    K_max: int = 3
    seed: int = 0
    trials: int | None = None
    output_format: str = "table"
    output_path: str | None = None


def _parse_t(text: str) -> float:
    text = text.strip().lower()
    if text in ("inf", "infinity", "+inf"):
        return math.inf
    try:
        t = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid t value {text!r}") from None
    if not t >= 0:
        raise argparse.ArgumentTypeError(f"t must be >= 0 or 'inf', got {text!r}")
    return t


def _t_list(text: str) -> list[float]:
    return [_parse_t(x) for x in text.split(",") if x.strip()]


def _positive_int(lo: int):
    def conv(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}, got {v}")
        return v

    return conv


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qlossless",
        description="Optimal lossless quantum codes with exponential length penalization.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", dest="input_path", help="density-matrix JSON, ensemble JSON, or a spectrum like 0.5,0.25,0.25")
    common.add_argument("--k", type=_positive_int(2), default=None, help="alphabet size (default 2)")
    common.add_argument("--t", type=_t_list, default=None, help="penalization parameter(s), comma separated; 'inf' allowed")
    common.add_argument("--alpha", type=_t_list, default=None, help="Renyi orders for 'entropy'")
    common.add_argument("--K-max", dest="K_max", type=_positive_int(1), default=3)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=_positive_int(1), default=None)
    common.add_argument("--format", dest="output_format", choices=("json", "csv", "table"), default="table")
    common.add_argument("--output", dest="output_path")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def parse_args(argv: Sequence[str] | None = None) -> CliConfig:
    """Parse argv into a :class:`CliConfig`; usage errors exit with code 2."""
    ns = build_parser().parse_args(argv)
    cfg = CliConfig(**{k: v for k, v in vars(ns).items()})
    if cfg.subcommand in ("entropy", "build-code", "encode", "sweep-t", "block-limit") and cfg.input_path is None:
        build_parser().error(f"{cfg.subcommand} requires --input")
    return cfg


# -- input loading -------------------------------------------------------------


def _read_text(path: str) -> str:
    p = Path(path)
    if not p.is_file():
        raise CliError(f"input file not found: {path}", EXIT_NO_FILE)
    return p.read_text()


def _spectrum(text: str) -> DensityOperator:
    vals = [float(x) for x in text.split(",")]
    return validate_density(np.diag(vals))


def load_density(source: str) -> DensityOperator:
    """Density operator from a JSON file, a spectrum file, or an inline spectrum."""
    try:
        if not Path(source).is_file() and _SPECTRUM_RE.match(source):
            return _spectrum(source)
        text = _read_text(source)
        if _SPECTRUM_RE.match(text):
            return _spectrum(text)
        return validate_density(matrix_from_json(json.loads(text)))
    except (DensityError, ValueError, KeyError, TypeError) as exc:
        raise CliError(f"malformed input: {exc}", EXIT_MALFORMED) from exc


def _load_json(source: str):
    text = _read_text(source)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"malformed JSON: {exc}", EXIT_MALFORMED) from exc


# -- output ------------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, float):
        if math.isinf(x):
            return "inf"
        return f"{x:.6f}"
    return str(x)


def render(rows: list[dict], fmt: str, payload=None) -> str:
    """Rows as an aligned table or CSV; JSON uses ``payload`` when given."""
    if fmt == "json":
        return json.dumps(rows if payload is None else payload, indent=1) + "\n"
    if not rows:
        return ""
    cols = list(rows[0].keys())
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([repr(r[c]) if isinstance(r[c], float) else r[c] for c in cols])
        return buf.getvalue()
    cells = [[_fmt(r[c]) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(cols, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def _json_float(x: float):
    return "inf" if math.isinf(x) else x


# -- subcommands ---------------------------------------------------------------


def _single_t(cfg: CliConfig) -> float:
    if cfg.t is None:
        return 0.0
    if len(cfg.t) != 1:
        raise CliError(f"{cfg.subcommand} takes a single --t value", EXIT_USAGE)
    return cfg.t[0]


def cmd_entropy(cfg: CliConfig) -> tuple[int, str]:
    rho = load_density(cfg.input_path)
    k = cfg.k or 2
    rows = [{"order": float(a), "entropy": entropy_of_order(rho, a, k)} for a in (cfg.alpha or DEFAULT_ALPHAS)]
    payload = {"k": k, "von_neumann": von_neumann(rho, k), "renyi": [{"order": _json_float(r["order"]), "entropy": r["entropy"]} for r in rows]}
    return EXIT_OK, render(rows, cfg.output_format, payload)


def cmd_build_code(cfg: CliConfig) -> tuple[int, str]:
    rho = load_density(cfg.input_path)
    k, t = cfg.k or 2, _single_t(cfg)
    enc = verify.optimal_encoder(rho, k, t)
    rows = [
        {"symbol": i, "eigenvalue": float(p), "word": w, "length": len(w)}
        for i, (p, w) in enumerate(zip(rho.eigenvalues, enc.words))
    ]
    payload = {
        "codebook": enc.code.to_json(),
        "t": _json_float(t),
        "lengths": [len(w) for w in enc.words],
        "eigenvalues": [float(x) for x in rho.eigenvalues],
        "basis": matrix_to_json(enc.basis),
        "t_avg_length": source_t_avg_length(enc, rho, t),
    }
    return EXIT_OK, render(rows, cfg.output_format, payload)


def cmd_encode(cfg: CliConfig) -> tuple[int, str]:
    """Encode every ensemble state; the codebook comes from the file or is built t-optimally."""
    obj = _load_json(cfg.input_path)
    k, t = cfg.k or 2, _single_t(cfg)
    try:
        ens = ensemble_from_json(obj)
        if "codebook" in obj:
            code = ClassicalCode.from_json(obj["codebook"])
            basis = matrix_from_json(obj["basis"]) if "basis" in obj else np.eye(ens.d)
            enc = build_encoder(basis, code)
        else:
            enc = verify.optimal_encoder(ens.density(), k, t)
    except QLosslessError as exc:
        raise CliError(f"malformed input: {exc}", EXIT_MALFORMED) from exc
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise CliError(f"malformed input: {exc}", EXIT_MALFORMED) from exc
    rows, states = [], []
    for n, (p, s) in enumerate(zip(ens.probs, ens.states)):
        w = encode(enc, s)
        row = {"state": n, "prob": float(p), "length": t_codeword_length(w, 0.0), "t_length": t_codeword_length(w, t), "base_length": base_length(w)}
        rows.append(row)
        states.append({**row, "codeword": w.to_json()})
    rho = ens.density()
    payload = {
        "codebook": enc.code.to_json(),
        "t": _json_float(t),
        "states": states,
        "source": {
            "avg_length": source_t_avg_length(enc, rho, 0.0),
            "t_avg_length": source_t_avg_length(enc, rho, t),
            "base_length": source_base_length(enc, ens),
        },
    }
    return EXIT_OK, render(rows, cfg.output_format, payload)


def cmd_verify(cfg: CliConfig) -> tuple[int, str]:
    config = verify.TrialConfig(
        master_seed=cfg.seed,
        ks=(cfg.k,) if cfg.k else verify.DEFAULT_KS,
        ts=tuple(t for t in cfg.t if not math.isinf(t)) if cfg.t is not None else verify.DEFAULT_TS,
        trials_per_cell=cfg.trials or verify.DEFAULT_TRIALS,
    )
    reports = verify.run_suite(config)
    failed = [r for r in reports if not r.passed]
    if cfg.output_format == "json":
        out = verify.reports_to_json(reports) + "\n"
    elif cfg.output_format == "csv":
        out = verify.reports_to_csv(reports)
    else:
        by_id: dict[str, list] = {}
        for r in reports:
            by_id.setdefault(r.theorem_id, []).append(r)
        rows = [
            {"check": tid, "trials": len(rs), "failed": sum(not r.passed for r in rs), "min_gap_lower": min(r.gap_lower for r in rs), "min_gap_upper": min(r.gap_upper for r in rs)}
            for tid, rs in sorted(by_id.items())
        ]
        out = render(rows, "table")
    return (EXIT_VERIFY_FAILED if failed else EXIT_OK), out


def sweep_t_rows(rho: DensityOperator, k: int, ts: Sequence[float]) -> list[dict]:
    """Tradeoff table: t-optimal code next to the escort-Shannon code, per t."""
    full_rank = rho.eigenvalues[-1] > verify.SUPPORT_TOL
    rows = []
    for t in ts:
        opt = verify.optimal_encoder(rho, k, t)
        bound = verify.check_optimal_bounds(rho, k, t)
        row = {
            "t": float(t),
            "t_avg_length": bound.achieved,
            "renyi_bound": bound.lower,
            "avg_length": source_t_avg_length(opt, rho, 0.0),
            "base_length": int(source_t_avg_length(opt, rho, math.inf)),
        }
        if full_rank:
            tr = verify.check_tradeoff(rho, k, t)
            row.update(
                shannon_avg_length=tr.achieved,
                shannon_lower=tr.lower,
                shannon_base_length=tr.params["base_length"],
            )
        rows.append(row)
    return rows


def cmd_sweep_t(cfg: CliConfig) -> tuple[int, str]:
    rho = load_density(cfg.input_path)
    rows = sweep_t_rows(rho, cfg.k or 2, cfg.t or DEFAULT_SWEEP_TS)
    payload = [{key: _json_float(v) if isinstance(v, float) else v for key, v in r.items()} for r in rows]
    return EXIT_OK, render(rows, cfg.output_format, payload)


def cmd_block_limit(cfg: CliConfig) -> tuple[int, str]:
    rho = load_density(cfg.input_path)
    k, t = cfg.k or 2, _single_t(cfg)
    reports = verify.block_limit_reports(rho, k, t, cfg.K_max)
    rows = [
        {"K": r.params["K"], "per_source_length": r.achieved, "lower": r.lower, "upper": r.upper, "pass": r.passed}
        for r in reports
    ]
    code = EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFY_FAILED
    return code, render(rows, cfg.output_format)


COMMANDS = {
    "entropy": cmd_entropy,
    "build-code": cmd_build_code,
    "encode": cmd_encode,
    "verify": cmd_verify,
    "sweep-t": cmd_sweep_t,
    "block-limit": cmd_block_limit,
}


def execute(cfg: CliConfig, stdout=None, stderr=None) -> int:
    """Run a parsed command, write its output, and return the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        code, text = COMMANDS[cfg.subcommand](cfg)
    except CliError as exc:
        print(f"error: {exc}", file=stderr)
        return exc.code
    except (NoConvergence, ArithmeticError, QLosslessError) as exc:
        print(f"numerical error: {exc}", file=stderr)
        return EXIT_NUMERIC
    if cfg.output_path:
        Path(cfg.output_path).write_text(text)
    else:
        stdout.write(text)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return execute(cfg)


if __name__ == "__main__":
    sys.exit(main())
