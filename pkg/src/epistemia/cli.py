"""Command-line front end.

Exit status: 0 for positive verdicts, 1 for negative ones, 2 for usage, I/O or
format errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import actions, complex as cx, formula, serialize as ser, solvability, update
from .model import PartialEpistemicModel

OK, NEGATIVE, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def thread_cap() -> int:
    """Parse ``EPISTEMIA_THREADS``; the library itself runs single-threaded."""
    raw = os.environ.get("EPISTEMIA_THREADS")
    if raw is None:
        return 1
    try:
        k = int(raw)
    except ValueError:
        raise UsageError(f"EPISTEMIA_THREADS must be a positive integer, got {raw!r}")
    if k < 1:
        raise UsageError(f"EPISTEMIA_THREADS must be a positive integer, got {raw!r}")
    return k


def _load(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise UsageError(f"{path}: {e.strerror}")
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}")


def _load_as(path: str, reader):
    obj = _load(path)
    try:
        return reader(obj)
    except ValueError as e:
        raise UsageError(f"{path}: {e}")


def _load_model(path: str) -> PartialEpistemicModel:
    obj = _load(path)
    try:
        if "facets" in obj:
            return ser.complex_from_json(obj).model
        return ser.model_from_json(obj)
    except ValueError as e:
        raise UsageError(f"{path}: {e}")


def _formula(text: str, n: int) -> formula.Formula:
    try:
        return formula.parse(text, n=n)
    except formula.FormulaSyntaxError as e:
        raise UsageError(f"formula: {e}")


def _world(m: PartialEpistemicModel, text: str):
    try:
        k = ser.decode_key(json.loads(text))
    except (json.JSONDecodeError, ValueError) as e:
        raise UsageError(f"--world: {e}")
    if k not in m:
        raise UsageError(f"--world: no such world {text}")
    return k


class Output:
    def __init__(self, path: str | None, quiet: bool):
        self.path, self.quiet, self.parts = path, quiet, []

    def write(self, text: str):
        self.parts.append(text)

    def json(self, obj):
        self.write(ser.dumps(obj))

    def flush(self):
        text = "".join(self.parts)
        if self.path:
            with open(self.path, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


# subcommands

def cmd_gen_input(args, out):
    values = args.values if args.values else None
    out.json(ser.model_to_json(cx.input_model(args.n, values)))
    return OK


def cmd_gen_mp0(args, out):
    out.json(ser.action_model_to_json(actions.mp0(args.n)))
    return OK


def cmd_gen_mp(args, out):
    out.json(ser.action_model_to_json(actions.mp_full(_load_model(args.input))))
    return OK


def cmd_gen_task(args, out):
    out.json(ser.action_model_to_json(actions.consensus_task(args.n)))
    return OK


def cmd_update(args, out):
    m = _load_model(args.model)
    a = _load_as(args.actions, ser.action_model_from_json)
    try:
        out.json(ser.model_to_json(update.product_update(m, a)))
    except ValueError as e:
        raise UsageError(str(e))
    return OK


def cmd_check(args, out):
    m = _load_model(args.model)
    f = _formula(args.formula, m.n)
    if args.world is not None:
        w = _world(m, args.world)
        holds = formula.evaluate(m, w, f)
        out.json({"verdict": "true" if holds else "false", "world": ser.encode_key(w)})
        return OK if holds else NEGATIVE
    v = formula.is_valid(m, f)
    res = {"verdict": "valid" if v else "invalid", "witness": None if v else ser.encode_key(v.witness)}
    out.json(res)
    return OK if v else NEGATIVE


def cmd_solve(args, out):
    inst = solvability.SolvabilityInstance(
        _load_model(args.input),
        _load_as(args.protocol, ser.action_model_from_json),
        _load_as(args.task, ser.action_model_from_json),
    )
    r = solvability.search_solution(inst, args.budget)
    res = {"verdict": r.verdict, "witness": None, "nodes": r.nodes}
    if r and not args.quiet:
        res["witness"] = ser.morphism_to_json(r.morphism)
    out.json(res)
    return OK if r else NEGATIVE


def _trace_json(trace):
    return [[{"agent": s.agent, "world": ser.encode_key(s.world)} for s in path] for path in trace]


def cmd_obstruct(args, out):
    n = args.n
    phi = _formula(args.formula, n) if args.formula else formula.build_phi(n)
    inp = cx.input_model(n)
    inst = solvability.SolvabilityInstance(inp, actions.mp_full(inp), actions.consensus_task(n))
    r = solvability.check_obstruction(inst, phi)
    res = {"verdict": r.verdict, "witness": None if r.witness is None else ser.encode_key(r.witness),
           "trace": [] if args.quiet else _trace_json(r.trace)}
    out.json(res)
    return OK if r else NEGATIVE


_BRIDGE = {
    "mp": lambda n: solvability.mp_protocol(n),
    "identity": lambda n: solvability.identity_map(n, "protocol"),
}
_BRIDGE_TASK = {
    "consensus": lambda n: solvability.consensus_simplicial_task(n),
    "identity": lambda n: solvability.identity_map(n, "task"),
}


def cmd_bridge(args, out):
    rep = solvability.equivalence_probe(_BRIDGE[args.protocol](args.n), _BRIDGE_TASK[args.task](args.n), args.budget)
    res = {"verdict": "agree" if rep.agree and rep.translated_ok else "disagree",
           "decision_map": rep.topological.found, "morphism": rep.logical.verdict}
    if not args.quiet:
        res["trace"] = rep.lines()
    out.json(res)
    return OK if res["verdict"] == "agree" else NEGATIVE


def cmd_export(args, out):
    obj = _load(args.file)
    try:
        thing = ser.load_any(obj)
    except ValueError as e:
        raise UsageError(f"{args.file}: {e}")
    if args.json:
        if isinstance(thing, cx.SimplicialModel):
            out.json(ser.complex_to_json(thing))
        elif isinstance(thing, actions.ActionModel):
            out.json(ser.action_model_to_json(thing))
        else:
            out.json(ser.model_to_json(thing))
        return OK
    if isinstance(thing, cx.SimplicialModel):
        out.write(ser.complex_to_dot(thing.complex))
    elif isinstance(thing, actions.ActionModel):
        out.write(ser.model_to_dot(thing.frame, "actions"))
    else:
        out.write(ser.model_to_dot(thing))
    return OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--quiet", action="store_true", help="suppress witnesses and traces")
    common.add_argument("--out", help="write output to this file instead of stdout")

    p = _Parser(prog="epistemia", description="Partial epistemic models, action models and task solvability.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("gen-input", parents=[common], help="input model JSON")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--values", type=int, nargs="+")
    s.set_defaults(fn=cmd_gen_input)

    s = sub.add_parser("gen-mp0", parents=[common], help="inputless message-passing action model")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(fn=cmd_gen_mp0)

    s = sub.add_parser("gen-mp", parents=[common], help="message-passing action model over an input model")
    s.add_argument("--input", required=True)
    s.set_defaults(fn=cmd_gen_mp)

    s = sub.add_parser("gen-task", parents=[common], help="task action model")
    s.add_argument("task", choices=["consensus"])
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(fn=cmd_gen_task)

    s = sub.add_parser("update", parents=[common], help="partial product update")
    s.add_argument("--model", required=True)
    s.add_argument("--actions", required=True)
    s.set_defaults(fn=cmd_update)

    s = sub.add_parser("check", parents=[common], help="validity or truth of a formula")
    s.add_argument("--model", required=True)
    s.add_argument("--formula", required=True)
    s.add_argument("--world", help="world key as JSON")
    s.set_defaults(fn=cmd_check)

    s = sub.add_parser("solve", parents=[common], help="search for a solving morphism")
    s.add_argument("--input", required=True)
    s.add_argument("--protocol", required=True)
    s.add_argument("--task", required=True)
    s.add_argument("--budget", type=int, default=1_000_000)
    s.set_defaults(fn=cmd_solve)

    s = sub.add_parser("obstruct", parents=[common], help="check a logical obstruction for consensus vs message passing")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--formula")
    s.set_defaults(fn=cmd_obstruct)

    s = sub.add_parser("bridge", parents=[common], help="compare decision-map and morphism searches")
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--protocol", choices=sorted(_BRIDGE), default="mp")
    s.add_argument("--task", choices=sorted(_BRIDGE_TASK), default="consensus")
    s.add_argument("--budget", type=int, default=1_000_000)
    s.set_defaults(fn=cmd_bridge)

    s = sub.add_parser("export", parents=[common], help="re-emit a model file as DOT or canonical JSON")
    s.add_argument("file")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--dot", action="store_true")
    g.add_argument("--json", action="store_true")
    s.set_defaults(fn=cmd_export)
    return p


def _validate(args):
    n = getattr(args, "n", None)
    if n is not None and n < 1:
        raise UsageError("--n must be at least 1")
    if args.command == "obstruct" and n < 3 and not args.formula:
        raise UsageError("the default obstruction formula needs --n >= 3")
    if getattr(args, "budget", 1) < 1:
        raise UsageError("--budget must be positive")


def run(argv: list | None = None) -> int:
    try:
        thread_cap()
        args = build_parser().parse_args(argv)
        _validate(args)
        out = Output(args.out, args.quiet)
        status = args.fn(args, out)
        out.flush()
        return status
    except UsageError as e:
        sys.stderr.write(f"epistemia: error: {e}\n")
        return USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
