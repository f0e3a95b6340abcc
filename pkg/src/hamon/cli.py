"""``hamon`` command line.

Exit status: 0 no alarm, 2 alarm at some index, 3 inconclusive verdicts
without any alarm, 1 input or usage error.
"""
from __future__ import annotations

import argparse
import json
import queue
import sys
import threading
import warnings
from pathlib import Path

from .bench import BenchPlan, compare_backends, emit_plot_data, resolve_model, run_bench
from .benchmarks import BUILTIN_NAMES
from .constraints import ConstraintSyntaxError
from .geometry import DimensionError
from .log import GenerationStuck, LogFormatError, format_log, generate_log, parse_header, parse_log, parse_row
from .model import against_safety, errors, product, validate
from .modelio import ModelFormatError, load_spec, model_to_dict
from .monitor import ACCEPTED, INCONCLUSIVE, MonitorConfig, MonitorError, MonitorSession, MonitorVerdict, run_monitor
from .numeric import format_rational, parse_rational
from .translate import TranslationError, export_external, method1_verdict

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_ALARM = 2
EXIT_INCONCLUSIVE = 3

FOLLOW_QUEUE_SIZE = 64

INPUT_ERRORS = (
    OSError,
    ValueError,  # covers the format, constraint and dimension errors
    ConstraintSyntaxError,
    DimensionError,
    LogFormatError,
    ModelFormatError,
    MonitorError,
    TranslationError,
)


class UsageError(Exception):
    pass


def _load_model(args):
    try:
        m = resolve_model(args.model)
    except ValueError as exc:
        if not Path(args.model).exists() and "unknown builtin" in str(exc):
            raise UsageError(f"{args.model}: no such model file or builtin ({', '.join(BUILTIN_NAMES)})") from None
        raise
    spec = getattr(args, "spec", None)
    if spec:
        m = against_safety(m, load_spec(spec))
    return m


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _write_out(text: str, out: str | None, force: bool) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    p = Path(out)
    if p.exists() and not force:
        raise UsageError(f"{out} exists (use --force to overwrite)")
    p.write_text(text)


def _config(args) -> MonitorConfig:
    return MonitorConfig(
        max_discrete_steps_per_interval=args.cap,
        merge_polyhedra=not args.no_merge,
        emit_witness=args.witness,
    )


def _exit_for(verdicts) -> int:
    if ACCEPTED in verdicts:
        return EXIT_ALARM
    if INCONCLUSIVE in verdicts:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _print_table(v: MonitorVerdict, witness: bool) -> None:
    print(f"{'index':>6}  {'time':>12}  verdict")
    for r in v.results:
        note = f"  ({r.diagnostic})" if r.diagnostic else ""
        print(f"{r.index:>6}  {format_rational(r.timestamp):>12}  {r.verdict}{note}")
        if witness and r.verdict == ACCEPTED and r.witness:
            for step in r.witness:
                edge = f" via edge {step.edge}" if step.edge is not None else ""
                print(f"{'':>8}{step.kind:<7} {step.location}{edge}: {step.region}")
    print("C = {" + ", ".join(str(i) for i in v.C) + "}")
    if v.saturated_intervals:
        print(f"exploration cap reached in interval(s) {v.saturated_intervals}")


def cmd_monitor(args) -> int:
    m = _load_model(args)
    cfg = _config(args)
    if args.follow:
        if args.method == 1:
            raise UsageError("--follow works with the incremental method only (--method 2)")
        return _follow(m, cfg, args)
    w = parse_log(_read_text(args.log), m.space)
    v = run_monitor(m, w, cfg) if args.method == 2 else method1_verdict(m, w, cfg)
    if args.json:
        json.dump(v.to_dict(with_witness=args.witness), sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        _print_table(v, args.witness)
    return _exit_for(v.verdicts)


_DONE = object()


def _follow(m, cfg, args) -> int:
    """One reader thread parses lines into a bounded queue; this thread
    monitors and prints each verdict as soon as it is known."""
    stream = sys.stdin if args.log == "-" else open(args.log)
    handoff: queue.Queue = queue.Queue(maxsize=FOLLOW_QUEUE_SIZE)

    def reader():
        try:
            space = None
            for lineno, line in enumerate(stream, 1):
                text = line.strip()
                if not text or text.startswith("#"):
                    continue
                if space is None:
                    space = parse_header(text, m.space)
                    continue
                handoff.put(parse_row(text, space, lineno))  # blocks when full
        except Exception as exc:  # handed to the monitor thread
            handoff.put(exc)
        finally:
            handoff.put(_DONE)

    thread = threading.Thread(target=reader, daemon=True)
    thread.start()
    session = MonitorSession(m, cfg)
    verdicts = []
    while True:
        item = handoff.get()
        if item is _DONE:
            break
        if isinstance(item, Exception):
            raise item
        r = session.feed(item)
        verdicts.append(r.verdict)
        if args.json:
            print(json.dumps(r.to_dict(with_witness=args.witness)), flush=True)
        else:
            note = f"  ({r.diagnostic})" if r.diagnostic else ""
            print(f"{r.index} {format_rational(r.timestamp)} {r.verdict}{note}", flush=True)
    thread.join()
    if stream is not sys.stdin:
        stream.close()
    return _exit_for(verdicts)


def cmd_product(args) -> int:
    a = resolve_model(args.a)
    b = resolve_model(args.b)
    P = product(a, b, accepting_from=args.accepting)
    _write_out(json.dumps(model_to_dict(P), indent=2) + "\n", args.output, args.force)
    return EXIT_OK


def cmd_export(args) -> int:
    m = _load_model(args)
    w = parse_log(_read_text(args.log), m.space)
    if len(w) == 0:
        raise UsageError("the log has no samples; translation needs at least one")
    _write_out(export_external(m, w), args.output, args.force)
    return EXIT_OK


def _interval(text: str):
    lo, sep, hi = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError("interval must look like lo:hi")
    return parse_rational(lo), parse_rational(hi)


def cmd_gen_log(args) -> int:
    m = _load_model(args)
    try:
        w = generate_log(m, args.seed, args.length, args.interval)
    except GenerationStuck as exc:
        sys.stdout.write(format_log(exc.partial))
        print(f"hamon: {exc} ({len(exc.partial)} samples written)", file=sys.stderr)
        return EXIT_INPUT
    _write_out(format_log(w), args.output, args.force)
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.compare_backends:
        result = compare_backends(args.model or "ACCI", args.lengths or (100, 1000), args.seeds or 3)
        _write_out(json.dumps(result, indent=2) + "\n", args.output, args.force)
        return EXIT_OK
    if args.plan:
        plan = BenchPlan.load(args.plan)
    elif args.model:
        plan = BenchPlan([args.model])
    else:
        raise UsageError("bench needs --plan or --model")
    if args.lengths:
        plan.lengths = args.lengths
    if args.seeds:
        plan.seeds = args.seeds
    if args.method:
        plan.method = {"1": "method1", "2": "direct", "both": "both"}[args.method]
    if args.cap:
        plan.cap = args.cap
    progress = None
    if args.verbose:
        progress = lambda name, n, seed: print(f"{name} length {n} seed {seed}", file=sys.stderr)  # noqa: E731
    report = run_bench(plan, progress)
    text = report.to_json() + "\n"
    if args.plot:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            text = emit_plot_data(report, args.plot) + "\n"
    _write_out(text, args.output, args.force)
    return EXIT_OK


def cmd_validate(args) -> int:
    m = _load_model(args)
    diags = validate(m)
    for d in diags:
        print(d)
    if errors(diags):
        return EXIT_INPUT
    if not diags:
        print("ok")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which would read as an alarm
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hamon", description="Model-bounded monitoring of sampled hybrid-system logs.")
    sub = p.add_subparsers(dest="command", required=True)

    def model_args(sp, spec=True):
        sp.add_argument("model", help="model JSON file or builtin (ACCI, 'ACCD(dim, eps)', 'ACCC(dim)')")
        if spec:
            sp.add_argument("--spec", help="safety spec JSON; monitors the violation automaton")

    def out_args(sp):
        sp.add_argument("-o", "--output", help="output file (default stdout)")
        sp.add_argument("--force", action="store_true", help="overwrite an existing output file")

    sp = sub.add_parser("monitor", help="decide which log prefixes the model admits")
    model_args(sp)
    sp.add_argument("log", help="CSV log, '-' for stdin")
    sp.add_argument("--method", type=int, choices=(1, 2), default=2, help="1: product translation, 2: incremental")
    sp.add_argument("--cap", type=int, help="discrete steps per interval (default 10*|L| or $HAMON_CAP)")
    sp.add_argument("--no-merge", action="store_true", help="keep reachable regions unmerged")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--witness", action="store_true", help="print a run behind every accepted index")
    sp.add_argument("--follow", action="store_true", help="stream samples and print verdicts as they arrive")
    sp.set_defaults(func=cmd_monitor)

    sp = sub.add_parser("product", help="synchronized product of two models")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("--accepting", choices=("a", "b", "both"), default="a")
    out_args(sp)
    sp.set_defaults(func=cmd_product)

    sp = sub.add_parser("export", help="product with the log automaton in the text exchange dialect")
    model_args(sp)
    sp.add_argument("log")
    out_args(sp)
    sp.set_defaults(func=cmd_export)

    sp = sub.add_parser("gen-log", help="random log following the model")
    model_args(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--length", type=int, default=100)
    sp.add_argument("--interval", type=_interval, default="1:5", help="sampling gaps lo:hi")
    out_args(sp)
    sp.set_defaults(func=cmd_gen_log)

    sp = sub.add_parser("bench", help="timing sweeps")
    sp.add_argument("--plan", help="plan JSON file")
    sp.add_argument("--model")
    sp.add_argument("--lengths", type=lambda s: [int(x) for x in s.split(",")])
    sp.add_argument("--seeds", type=int)
    sp.add_argument("--method", choices=("1", "2", "both"))
    sp.add_argument("--cap", type=int)
    sp.add_argument("--plot", choices=("length", "dimension"), help="emit plot columns instead of JSON")
    sp.add_argument("--compare-backends", action="store_true", help="time compiled against pure kernels")
    sp.add_argument("-v", "--verbose", action="store_true")
    out_args(sp)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("validate", help="check a model for structural problems")
    model_args(sp)
    sp.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"hamon: {exc}", file=sys.stderr)
    except INPUT_ERRORS as exc:
        print(f"hamon: {exc}", file=sys.stderr)
    except KeyboardInterrupt:
        print("hamon: interrupted", file=sys.stderr)
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
