"""Command-line front end.

Every command prints a plain-text report ending in ``RESULT pass|fail|inconclusive``;
the exit status is 0, 1 or 2 accordingly.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from . import gallery
from .automata import DeterministicMAutomaton, RunBounds, language_agreement, run_deterministic, run_nondeterministic
from .constructions import EmbeddingError, extract_embedding, schreier_construct, verify_main_theorem
from .formats import FormatError, format_automaton, load_automaton, load_scenario, parse_automaton, parse_pda, parse_scenario
from .groups import GroupError, as_word, word_str
from .report import EXIT_CODES, FAIL, INCONCLUSIVE, PASS, Report


def _bounds(scenario, args):
    over = {}
    for flag in ("max_len", "max_register_size", "max_cosets"):
        value = getattr(args, flag, None)
        if value is not None:
            over[flag] = value
    return dataclasses.replace(scenario.bounds, **over) if over else scenario.bounds


def _emit(report: Report, out=None) -> int:
    (out or sys.stdout).write(report.render())
    return report.exit_code


def cmd_validate(args) -> int:
    text = Path(args.file).read_text()
    head = next((line.split()[0] for line in text.splitlines() if line.split() and not line.startswith("#")), "")
    rep = Report(f"validate {args.file}")
    try:
        if head == "scenario":
            s = parse_scenario(text)
            s.embedding()
            detail = f"OK, scenario {s.name}, group {s.oracle.group.describe()}, subgroup {s.subgroup.name}"
        elif head == "pda":
            P = parse_pda(text)
            detail = f"OK, pushdown automaton, {P.n_states} states"
        else:
            A = parse_automaton(text)
            kind = "deterministic" if A.deterministic else "nondeterministic"
            detail = f"OK, {kind}, {A.n_states} states"
    except FormatError as exc:
        for n, msg in exc.problems:
            print(f"{args.file}:{n}: {msg}", file=sys.stderr)
        rep.add("valid", FAIL, f"{len(exc.problems)} problems")
        return _emit(rep)
    except (EmbeddingError, GroupError) as exc:
        print(f"{args.file}: {exc}", file=sys.stderr)
        rep.add("valid", FAIL, str(exc))
        return _emit(rep)
    print(detail)
    rep.add("valid", PASS, detail)
    return _emit(rep)


def cmd_run(args) -> int:
    A = load_automaton(args.file)
    M = A.monoid
    w = as_word(args.word)
    rep = Report(f"run {args.file} on {word_str(w)}")
    if A.deterministic:
        outcome = run_deterministic(A, w)
        for k, c in enumerate(outcome.trace):
            print(f"step {k}: state={c.state} register={M.format(c.register)}")
        reg = M.format(outcome.final.register)
        if outcome.accepted:
            print(f"ACCEPT register={reg}")
            rep.add("accepted", PASS)
        else:
            extra = f" at position {outcome.stuck_at}" if outcome.stuck_at is not None else ""
            print(f"REJECT {outcome.reason} {reg}{extra}")
            rep.add("accepted", FAIL, outcome.reason)
    else:
        bounds = RunBounds(max_register_size=args.max_register_size or 12)
        res = run_nondeterministic(A, w, bounds)
        for c in sorted(res.frontier, key=lambda c: (c.state, M.format(c.register))):
            print(f"config: state={c.state} register={M.format(c.register)}")
        print(f"frontier sizes: {res.frontier_sizes} truncated={res.truncated}")
        print({"accept": "ACCEPT", "reject": "REJECT", "unknown": "UNKNOWN"}[res.verdict])
        rep.add("accepted", {"accept": PASS, "reject": FAIL, "unknown": INCONCLUSIVE}[res.verdict])
    return _emit(rep)


def cmd_agree(args) -> int:
    A = load_automaton(args.file)
    s = load_scenario(args.scenario)
    b = _bounds(s, args)
    mode = "det" if A.deterministic else "nondet"
    agreement = language_agreement(A, s.oracle.in_word_problem, b.max_len, mode=mode, bounds=b.run_bounds())
    rep = Report(f"agreement of {args.file} with WP({s.oracle.group.describe()})")
    rep.info.append(f"words checked: {agreement.total}")
    for w, got, expected in agreement.disagreements[:10]:
        rep.info.append(f"disagreement {word_str(w)}: automaton={got} word-problem={expected}")
    rep.add("disagreements", not agreement.disagreements, str(len(agreement.disagreements)))
    if agreement.truncated:
        rep.add("truncated", INCONCLUSIVE, f"{len(agreement.truncated)} words")
    return _emit(rep)


def cmd_schreier(args) -> int:
    s = load_scenario(args.scenario)
    b = _bounds(s, args)
    rep = Report(f"schreier construction for {s.name}")
    try:
        A = schreier_construct(s.oracle, s.embedding(), b.max_cosets)
    except EmbeddingError as exc:
        rep.add("construction", FAIL, str(exc))
        return _emit(rep, sys.stderr if not args.out else None)
    text = format_automaton(A)
    rep.add("construction", PASS, f"{A.n_states} states")
    if args.out:
        Path(args.out).write_text(text)
        rep.info.append(f"written to {args.out}")
        return _emit(rep)
    sys.stdout.write(text)
    return _emit(rep, sys.stderr)


def cmd_extract(args) -> int:
    A = load_automaton(args.file)
    s = load_scenario(args.scenario)
    if not isinstance(A, DeterministicMAutomaton):
        rep = Report("extract")
        rep.add("deterministic", FAIL, "extraction needs a dautomaton file")
        return _emit(rep)
    result = extract_embedding(A, s.oracle, _bounds(s, args))
    result.report.title = f"extraction from {args.file}"
    return _emit(result.report)


def cmd_theorem(args) -> int:
    s = load_scenario(args.scenario)
    try:
        spec = s.embedding()
    except EmbeddingError as exc:
        rep = Report(f"theorem round trip for {s.name}")
        rep.add("embedding", FAIL, str(exc))
        return _emit(rep)
    result = verify_main_theorem(s.oracle, s.monoid, spec, _bounds(s, args))
    return _emit(result.report)


def cmd_gallery(args) -> int:
    return _emit(gallery.demo(args.name))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mautomata", description="Blind monoid register automata and group word problems.")
    sub = p.add_subparsers(dest="command", required=True)

    def bound_flags(sp):
        sp.add_argument("--max-len", type=int, dest="max_len")
        sp.add_argument("--max-register-size", type=int, dest="max_register_size")
        sp.add_argument("--max-cosets", type=int, dest="max_cosets")

    sp = sub.add_parser("validate", help="check an automaton, scenario or pda file")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("run", help="run an automaton on a word ('' or e for the empty word)")
    sp.add_argument("file")
    sp.add_argument("word")
    bound_flags(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("agree", help="compare an automaton with a scenario's word problem")
    sp.add_argument("file")
    sp.add_argument("scenario")
    bound_flags(sp)
    sp.set_defaults(func=cmd_agree)

    sp = sub.add_parser("schreier", help="build the Schreier automaton of a scenario")
    sp.add_argument("scenario")
    sp.add_argument("--out")
    bound_flags(sp)
    sp.set_defaults(func=cmd_schreier)

    sp = sub.add_parser("extract", help="extract subgroup and embedding from a deterministic automaton")
    sp.add_argument("file")
    sp.add_argument("scenario")
    bound_flags(sp)
    sp.set_defaults(func=cmd_extract)

    sp = sub.add_parser("theorem", help="construct, check and extract for a scenario")
    sp.add_argument("scenario")
    bound_flags(sp)
    sp.set_defaults(func=cmd_theorem)

    sp = sub.add_parser("gallery", help="run a named demo")
    sp.add_argument("name", choices=gallery.DEMOS)
    sp.set_defaults(func=cmd_gallery)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for flag in ("max_len", "max_register_size", "max_cosets"):
        value = getattr(args, flag, None)
        if value is not None and value <= 0:
            print(f"--{flag.replace('_', '-')} must be positive", file=sys.stderr)
            return EXIT_CODES[FAIL]
    try:
        return args.func(args)
    except FormatError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CODES[FAIL]
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CODES[FAIL]


if __name__ == "__main__":
    sys.exit(main())
