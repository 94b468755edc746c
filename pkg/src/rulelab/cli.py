"""Command-line front end: ``rulelab {mine,simulate,gen,eval,pn,measure}``.

Numeric defaults can be set through ``RULELAB_*`` environment variables
(``RULELAB_MIN_SUPPORT``, ``RULELAB_DELTA``, ``RULELAB_SEED``, ...);
explicit flags win over the environment.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import evaluate, measures, mine, questgen, simulate, txdb
from .measures import DEFAULT_DELTA, ContingencyCounts

ENV_PREFIX = "RULELAB_"


def _env(name: str, conv, default):
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None or raw == "":
        return default
    try:
        return conv(raw)
    except ValueError:
        raise SystemExit(f"rulelab: bad value for {ENV_PREFIX}{name}: {raw!r}") from None


def parse_grid(text: str) -> np.ndarray:
    """``a,b,c`` lists thresholds; ``start:stop:num`` is an evenly spaced grid."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid {text!r} must look like start:stop:num")
        start, stop, num = float(parts[0]), float(parts[1]), int(parts[2])
        if num < 1:
            raise ValueError("grid needs at least one point")
        return np.linspace(start, stop, num)
    values = [float(v) for v in text.split(",") if v.strip()]
    if not values:
        raise ValueError("empty grid")
    return np.array(values)


def _measure_list(values) -> list[str]:
    out = []
    for v in values or ():
        out.extend(measures.canonical_name(x) for x in v.split(",") if x.strip())
    return out


@dataclass
class RunConfig:
    subcommand: str
    min_support: float = 0.001
    delta: float = DEFAULT_DELTA
    gamma: float | None = None
    alpha: float | None = None
    seed: int = 0
    measures: list = field(default_factory=list)
    grid: np.ndarray | None = None

    def validate(self) -> None:
        if not 0.0 < self.min_support <= 1.0:
            raise ValueError(f"--min-support must lie in (0, 1], got {self.min_support}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"--delta must lie in (0, 1), got {self.delta}")
        if self.gamma is not None and not 0.0 < self.gamma < 1.0:
            raise ValueError(f"--gamma must lie in (0, 1), got {self.gamma}")
        if self.alpha is not None and not 0.0 < self.alpha < 1.0:
            raise ValueError(f"--alpha must lie in (0, 1), got {self.alpha}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("--seed must be a 64-bit unsigned integer")


def _config(args) -> RunConfig:
    grid = parse_grid(args.grid) if getattr(args, "grid", None) else None
    measure_arg = getattr(args, "measure", None)
    cfg = RunConfig(
        subcommand=args.command,
        min_support=getattr(args, "min_support", 0.001),
        delta=args.delta,
        gamma=getattr(args, "gamma", None),
        alpha=getattr(args, "alpha", None),
        seed=getattr(args, "seed", 0),
        measures=_measure_list(measure_arg if isinstance(measure_arg, list) else
                               [measure_arg] if measure_arg else []),
        grid=grid,
    )
    cfg.validate()
    return cfg


def _write(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _announce_seed(seed: int) -> None:
    print(f"seed={seed}", file=sys.stderr)


# -- subcommands ----------------------------------------------------------------

def cmd_mine(args) -> int:
    cfg = _config(args)
    db = txdb.load_basket(args.input)
    if args.pairs:
        rules = mine.all_pair_rules(db)
    else:
        rules = mine.mine_rules(db, cfg.min_support)
    gamma = cfg.gamma
    if cfg.alpha is not None:
        gamma = evaluate.bonferroni_gamma(cfg.alpha, max(len(rules), 1))
        print(f"bonferroni gamma={gamma!r} over {len(rules)} tests", file=sys.stderr)
    if gamma is not None:
        rules = evaluate.filter(rules, "hyper_confidence", gamma, inclusive=True)
    buf = io.StringIO()
    mine.write_rules_csv(rules, db.catalog, buf, cfg.measures, cfg.delta)
    _write(buf.getvalue(), args.out)
    return 0


def cmd_simulate(args) -> int:
    cfg = _config(args)
    if args.model:
        model = simulate.IndependenceModel.load(args.model)
    else:
        if args.input is None:
            raise ValueError("simulate needs --input or --model")
        if args.t is None:
            raise ValueError("simulate --input needs --t (observation length)")
        model = simulate.fit(txdb.load_basket(args.input), args.t)
    if args.model_out:
        model.save(args.model_out)
    _announce_seed(cfg.seed)
    db = simulate.simulate(model, cfg.seed)
    print(f"m={db.m} expected={model.expected_transactions:g}", file=sys.stderr)
    _write(txdb.format_basket(db), args.out)
    return 0


def cmd_gen(args) -> int:
    cfg = _config(args)
    gc = questgen.GeneratorConfig(
        n_transactions=args.transactions,
        avg_transaction_size=args.avg_size,
        avg_pattern_size=args.pattern_size,
        n_patterns=args.patterns,
        n_items=args.items,
        corruption_mean=args.corruption,
        seed=cfg.seed,
    )
    _announce_seed(cfg.seed)
    db, log = questgen.generate(gc)
    log.save(args.patterns_out)
    _write(txdb.format_basket(db), args.out)
    return 0


def _curve_output(text_csv: str, doc: dict, out: str | None) -> None:
    if out not in (None, "-") and out.endswith(".json"):
        _write(json.dumps(doc, indent=1) + "\n", out)
    else:
        _write(text_csv, out)


def cmd_eval(args) -> int:
    cfg = _config(args)
    if len(cfg.measures) != 1:
        raise ValueError("eval needs exactly one --measure")
    real, _ = mine.read_rules_csv(args.real)
    null, _ = mine.read_rules_csv(args.null)
    curve = evaluate.sweep(real, null, cfg.measures[0], cfg.grid, cfg.delta)
    _curve_output(curve.to_csv(), curve.to_json(), args.out)
    return 0


def cmd_pn(args) -> int:
    cfg = _config(args)
    if len(cfg.measures) != 1:
        raise ValueError("pn needs exactly one --measure")
    rules, catalog = mine.read_rules_csv(args.rules)
    log = questgen.PatternLog.load(args.patterns)
    pts = evaluate.pn_graph(rules, log, cfg.measures[0], cfg.grid, catalog=catalog, delta=cfg.delta)
    doc = json.loads(evaluate.pn_to_json(pts, cfg.measures[0]))
    _curve_output(evaluate.pn_to_csv(pts), doc, args.out)
    return 0


def cmd_measure(args) -> int:
    cfg = _config(args)
    lines = []
    if args.cx is not None:
        counts = ContingencyCounts(args.cx, args.cy, args.cxy, args.m)
        vec = measures.measure_vector(counts, cfg.delta)
        names = cfg.measures or list(measures.MEASURES)
        lines.append(f"expected_count={mine.format_value(measures.expected_count(counts))}")
        lines.append(f"quantile={measures.quantile(counts, cfg.delta)}")
        for name in names:
            lines.append(f"{name}={mine.format_value(getattr(vec, name))}")
        if cfg.gamma is not None:
            lines.append(f"accepted={str(vec.hyper_confidence >= cfg.gamma).lower()}")
    if cfg.alpha is not None:
        if args.tests is None:
            raise ValueError("--alpha needs --tests")
        lines.append(f"bonferroni_gamma={evaluate.bonferroni_gamma(cfg.alpha, args.tests)!r}")
    if not lines:
        raise ValueError("measure needs --cx/--cy/--cxy/--m or --alpha/--tests")
    _write("\n".join(lines) + "\n", args.out)
    return 0


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rulelab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, support=False, seed=False, measure="many", grid=False):
        sp.add_argument("--delta", type=float, default=_env("DELTA", float, DEFAULT_DELTA),
                        help="quantile level for hyper-lift (default 0.99)")
        if support:
            sp.add_argument("--min-support", type=float,
                            default=_env("MIN_SUPPORT", float, 0.001))
        if seed:
            sp.add_argument("--seed", type=int, default=_env("SEED", int, 0))
        if measure == "many":
            sp.add_argument("--measure", action="append", default=None,
                            help="measure column(s); repeat or comma-separate")
        elif measure == "one":
            sp.add_argument("--measure", required=True)
        if grid:
            sp.add_argument("--grid", default=os.environ.get(ENV_PREFIX + "GRID"),
                            help="thresholds: a,b,c or start:stop:num")
        sp.add_argument("--out", "-o", default=None, help="output file (default stdout)")

    sp = sub.add_parser("mine", help="mine rules and annotate them with measures")
    sp.add_argument("--input", "-i", required=True)
    sp.add_argument("--pairs", action="store_true", help="all item pairs, no support floor")
    sp.add_argument("--gamma", type=float, default=_env("GAMMA", float, None),
                    help="keep rules with hyper-confidence >= gamma")
    sp.add_argument("--alpha", type=float, default=_env("ALPHA", float, None),
                    help="Bonferroni-corrected hyper-confidence filter at family level alpha")
    common(sp, support=True)
    sp.set_defaults(func=cmd_mine)

    sp = sub.add_parser("simulate", help="fit the independence model and draw a null database")
    sp.add_argument("--input", "-i")
    sp.add_argument("--model", help="model JSON instead of fitting --input")
    sp.add_argument("--t", type=float, default=_env("T", float, None), help="observation length")
    sp.add_argument("--model-out")
    common(sp, seed=True, measure=None)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("gen", help="synthetic data with logged generating patterns")
    sp.add_argument("--transactions", type=int, default=100_000)
    sp.add_argument("--avg-size", type=float, default=10.0)
    sp.add_argument("--pattern-size", type=float, default=4.0)
    sp.add_argument("--patterns", type=int, default=2000)
    sp.add_argument("--items", type=int, default=1000)
    sp.add_argument("--corruption", type=float, default=0.5)
    sp.add_argument("--patterns-out", required=True)
    common(sp, seed=True, measure=None)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("eval", help="threshold sweep on real vs null rules")
    sp.add_argument("--real", required=True)
    sp.add_argument("--null", required=True)
    common(sp, measure="one", grid=True)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("pn", help="PN graph against generating patterns")
    sp.add_argument("--rules", required=True)
    sp.add_argument("--patterns", required=True)
    common(sp, measure="one", grid=True)
    sp.set_defaults(func=cmd_pn)

    sp = sub.add_parser("measure", help="all measures for one set of counts")
    sp.add_argument("--cx", type=int)
    sp.add_argument("--cy", type=int)
    sp.add_argument("--cxy", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--gamma", type=float, default=_env("GAMMA", float, None))
    sp.add_argument("--alpha", type=float, default=_env("ALPHA", float, None))
    sp.add_argument("--tests", type=int, help="number of tests for --alpha")
    common(sp)
    sp.set_defaults(func=cmd_measure)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "measure" and args.cx is not None and None in (args.cy, args.cxy, args.m):
        parser.error("--cx, --cy, --cxy and --m go together")
    try:
        return args.func(args)
    except (OSError, ValueError, ArithmeticError) as exc:
        print(f"rulelab {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
