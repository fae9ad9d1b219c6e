import argparse
import json
import logging
import sys
import time
from typing import Any

import pandas as pd
from pydantic import BaseModel

from .config import load as load_config
from .cyclotomic import CycloData, MODES, ROUTES, cyclo_dim, cyclo_normalize
from .diagrams import parse_expr
from .normalform import STATS, STRATEGIES, dim_filtered, enumerate_keys, nm_compose, nm_tensor, normalize
from .qrep import central_element_matrix, phi_eval, psi_eval
from .suites import SUITES, Check, SuiteParams, run_suite
from .utils import CapExceeded, apply_caps, normalize_word, setup_logging
from .verma import Truncation, psiM_eval, standard_input

logger = logging.getLogger("CLI")

VERBS = ("normalize", "dim", "compose", "phi", "psi", "psim", "central", "cyclo", "verify")


class Report(BaseModel):
    verb: str
    status: str
    checks: list[Check] = []
    result: dict[str, Any] = {}
    timing: float = 0.0
    counters: dict[str, int] = {}
    seed: int | None = None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="obc", description="Exact engine for oriented Brauer-Clifford categories")
    p.add_argument("verb", nargs="?", choices=VERBS)
    p.add_argument("--expr", action="append", help="expression; give twice for compose")
    p.add_argument("--expr-file", action="append", help="file holding an expression")
    p.add_argument("--src")
    p.add_argument("--dst")
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--k", type=int, default=1, help="central element index")
    p.add_argument("--module", default="", help="word M for psi (V^M as the module)")
    p.add_argument("--f", default="t^2-3")
    p.add_argument("--fprime", default="formal")
    p.add_argument("--mode", choices=MODES, default="set1")
    p.add_argument("--route", choices=ROUTES, default="curl")
    p.add_argument("--max-dots", type=int)
    p.add_argument("--per-strand", type=int)
    p.add_argument("--truncation", type=int, help="psim: Cartan degree kept in the Verma module")
    p.add_argument("--filtered", action="store_true", help="dim: count keys times bubble monomials")
    p.add_argument("--tensor", action="store_true", help="compose: tensor instead of compose")
    p.add_argument("--suite", choices=sorted(SUITES))
    p.add_argument("--strategy", choices=STRATEGIES, default="global")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int)
    p.add_argument("--schema", action="store_true", help="print the Report JSON schema and exit")
    p.add_argument("--max-word", type=int, help="override OBC_MAX_WORD")
    p.add_argument("--max-dim", type=int, help="override OBC_MAX_DIM")
    p.add_argument("--max-ell", type=int, help="override OBC_MAX_ELL")
    p.add_argument("--precision", type=int, help="override OBC_DELTA_PRECISION")
    return p


def _exprs(args) -> list:
    texts = list(args.expr or [])
    for path in args.expr_file or []:
        with open(path, encoding="utf-8") as fh:
            texts.append(fh.read())
    if not texts:
        raise ValueError("missing --expr or --expr-file")
    return [parse_expr(t) for t in texts]


def _matrix_result(m) -> dict:
    return {"matrix": json.loads(m.to_json()), "text": m.to_coordinate_text()}


def _run_normalize(args) -> dict:
    e = _exprs(args)[0]
    nm = normalize(e, args.strategy)
    return {"normal_form": json.loads(nm.to_json()), "text": str(nm)}


def _run_dim(args) -> dict:
    if args.src is None or args.dst is None:
        raise ValueError("dim needs --src and --dst")
    a, b = normalize_word(args.src), normalize_word(args.dst)
    if args.filtered:
        if args.max_dots is None:
            raise ValueError("--filtered needs --max-dots")
        count = dim_filtered(a, b, args.max_dots)
    else:
        count = sum(1 for _ in enumerate_keys(a, b, max_dots=args.max_dots, per_strand=args.per_strand))
    return {"src": a, "dst": b, "dim": count, "text": str(count)}


def _run_compose(args) -> dict:
    exprs = _exprs(args)
    if len(exprs) != 2:
        raise ValueError("compose needs exactly two expressions")
    f, g = (normalize(e, args.strategy) for e in exprs)
    nm = nm_tensor(f, g) if args.tensor else nm_compose(f, g)
    return {"normal_form": json.loads(nm.to_json()), "text": str(nm)}


def _run_phi(args) -> dict:
    return _matrix_result(phi_eval(args.n or 1, _exprs(args)[0]))


def _run_psi(args) -> dict:
    return _matrix_result(psi_eval(args.n or 1, _exprs(args)[0], args.module))


def _run_psim(args) -> dict:
    e = _exprs(args)[0]
    n = args.n or 3
    r = len(e.src)
    if e.src != "u" * r:
        raise ValueError("psim acts on v_r (x) ... (x) v_1 (x) u-hat; the source must be all up strands")
    t = Truncation(D=args.truncation) if args.truncation is not None else Truncation()
    v = psiM_eval(n, e, standard_input(n, r), t)
    return {"terms": len(v.terms), "grading": v.grading(), "truncated": v.truncated, "text": v.dump()}


def _run_central(args) -> dict:
    word = normalize_word(args.src or "u")
    return _matrix_result(central_element_matrix(args.n or 1, args.k, word, allow_even=True))


def _run_cyclo(args) -> dict:
    data = CycloData.from_text(args.f, args.fprime)
    out = {"data": json.loads(data.to_json())}
    lines = [repr(data)]
    if args.expr or args.expr_file:
        cm = cyclo_normalize(_exprs(args)[0], data, mode=args.mode, route=args.route, strategy=args.strategy)
        out["normal_form"] = {str(k): str(c) for k, c in sorted(cm.terms.items())}
        lines.append(str(cm))
    if args.src is not None and args.dst is not None:
        dim = cyclo_dim(normalize_word(args.src), normalize_word(args.dst), data.ell)
        out["dim"] = dim
        lines.append(f"dim = {dim}")
    out["text"] = "\n".join(lines)
    return out


_HANDLERS = {
    "normalize": _run_normalize,
    "dim": _run_dim,
    "compose": _run_compose,
    "phi": _run_phi,
    "psi": _run_psi,
    "psim": _run_psim,
    "central": _run_central,
    "cyclo": _run_cyclo,
}


def execute(args) -> Report:
    started = time.perf_counter()
    before = dict(STATS)
    checks = []
    result = {}
    if args.verb == "verify":
        if not args.suite:
            raise ValueError("verify needs --suite")
        params = SuiteParams(n=args.n, r=args.r, s=args.s, seed=args.seed, count=args.count, f=args.f,
                             fprime=args.fprime, max_dots=args.max_dots, strategy=args.strategy)
        checks = run_suite(args.suite, params)
        result = {"suite": args.suite, "passed": sum(c.ok for c in checks), "total": len(checks)}
    else:
        result = _HANDLERS[args.verb](args)
    counters = {k: v - before.get(k, 0) for k, v in STATS.items() if v - before.get(k, 0)}
    return Report(
        verb=args.verb,
        status="pass" if all(c.ok for c in checks) else "fail",
        checks=checks,
        result=result,
        timing=round(time.perf_counter() - started, 3),
        counters=counters,
        seed=args.seed if args.verb == "verify" else None,
    )


def _print_text(report: Report):
    if report.checks:
        frame = pd.DataFrame([c.model_dump() for c in report.checks], columns=["name", "ok", "detail"])
        print(frame.to_string(index=False))
        print(f"{report.result['passed']}/{report.result['total']} checks passed ({report.timing}s)")
    elif "text" in report.result:
        print(report.result["text"])


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.schema:
        print(json.dumps(Report.model_json_schema(), indent=2))
        return 0
    if not args.verb:
        parser.print_usage()
        return 2
    try:
        cfg = load_config()
    except RuntimeError as e:
        print(f"[Error] {e}")
        return 2
    setup_logging(cfg["OBC_LOG_LEVEL"])
    for flag, key in (("max_word", "OBC_MAX_WORD"), ("max_dim", "OBC_MAX_DIM"),
                      ("max_ell", "OBC_MAX_ELL"), ("precision", "OBC_DELTA_PRECISION")):
        if getattr(args, flag) is not None:
            cfg[key] = getattr(args, flag)
    apply_caps(cfg)
    try:
        report = execute(args)
    except (ValueError, CapExceeded, OSError) as e:
        logger.debug("usage error", exc_info=True)
        print(f"[Error] {e}")
        return 2
    if args.format == "json":
        print(report.model_dump_json())
    else:
        _print_text(report)
    return 0 if report.status == "pass" else 1


def main():
    sys.exit(run())
