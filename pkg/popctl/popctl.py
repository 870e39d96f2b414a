# SPDX-FileCopyrightText: 2026 aesc silicon
#
# SPDX-License-Identifier: AGPL-3.0-or-later

"""
Command-line interface for random population control.

This module provides subcommands to:
- Decide whether arbitrarily many tokens can be controlled (`decide`)
- Solve a fixed population size exactly (`oracle`)
- Run the safe random walk of a fixed population (`simulate`)
- Decide a sequential flow instance (`flow`)
- Emit gadget MDPs with known answers (`gadget`)
- Close and dump the flow semigroup of an instance (`semigroup`)

Every subcommand prints a `key: value` report. The exit code is 0 when an
answer was computed, 1 on input or configuration errors and 2 when a
resource cap was hit before an answer was known.
"""

import argparse
import logging
import sys
from multiprocessing import cpu_count
from pathlib import Path
from rich.console import Console
from rich.live import Live
from rich.logging import RichHandler

from popctl.library.common import (
    BudgetExceededError,
    ConfigNotSupportedError,
    InputError,
    Settings,
    activate
)
from popctl.library.control import decide, initial_symbolic
from popctl.library.flowproblem import (
    bounded_path_oracle,
    parse_flow_instance,
    reduce_to_constant_one,
    reduced_initial,
    semigroup_for,
    solve_sequential_flow
)
from popctl.library.gadget import CORPUS, KINDS, GadgetSpec, build
from popctl.library.gadgets.countdown import countdown_winner, parse_countdown_game
from popctl.library.model import format_config, parse_mdp, render_commit, render_mdp
from popctl.library.oracle import simulate, winning_region
from popctl.library.report import (
    STATUS_ERROR,
    STATUS_INCONCLUSIVE,
    RunReport,
    digest
)
from popctl.library.semigroup import decide_flow_condition, dump_semigroup


log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INCONCLUSIVE = 2

GRAMMAR = """\
input grammar:
  states: <state> ...
  actions: <action> ...
  init: <state>
  final: <state> ...
  trans: <state> <action> -> <state> ...
flow instances add:
  w0: <entry> ...             (entries are numbers or w)
  commit: <entry> ... <action>
  target: <entry> ... <action>
countdown games:
  start: <vertex> <counter>
  edge: <vertex> <weight> <vertex>
"""


class ArgumentParser(argparse.ArgumentParser):
    """Argument parser that reports usage errors with exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n{GRAMMAR}")
        sys.exit(EXIT_INPUT)


def _read(path: Path, report: RunReport) -> str:
    data = path.read_bytes()
    report.digest = digest(data)
    return data.decode("utf-8")


def func_decide(args, settings, report):
    """
    Subcommand: decide the random population control problem.

    Args:
        args (Namespace): Parsed CLI arguments.
        settings (Settings): Active settings.
        report (RunReport): Report to fill.
    """
    mdp = parse_mdp(_read(args.input, report))
    cap = settings.get_limit("decide_states")
    report.set("states", mdp.num_states)
    report.set("actions", mdp.num_actions)
    if mdp.num_states > cap:
        report.status = STATUS_INCONCLUSIVE
        report.set("reason", f"{mdp.num_states} states exceed the decide cap of {cap}")
        return
    console = Console(stderr=True, color_system=None)
    with report.phase("decide"), Live("Deciding ...", console=console, transient=True):
        result = decide(mdp, cap=cap, shuffle_seed=args.shuffle_seed)
    report.answer = result.answer
    report.set("iterations", result.iterations)
    report.set("trajectory", list(result.trajectory))
    report.set("fixpoint", result.fixpoint.size())
    report.set("maximal", len(result.fixpoint.commits))
    if not result.answer:
        fixpoint_mdp = result.fixpoint.mdp
        start = initial_symbolic(fixpoint_mdp)
        removals = result.initial_removals()
        report.set("initial", format_config(start))
        for removal in removals[:1]:
            report.set("removed", f"{render_commit(fixpoint_mdp, removal.commit)} "
                                  f"({removal.reason}, iteration {removal.iteration})")


def func_oracle(args, settings, report):
    """
    Subcommand: decide a fixed population size exactly.

    Args:
        args (Namespace): Parsed CLI arguments.
        settings (Settings): Active settings.
        report (RunReport): Report to fill.
    """
    mdp = parse_mdp(_read(args.input, report))
    budget = args.budget or settings.get_limit("oracle_configurations")
    with report.phase("oracle"):
        region = winning_region(mdp, args.tokens, budget=budget)
    report.answer = region.contains_start()
    report.set("tokens", args.tokens)
    report.set("configurations", len(region.successors))
    report.set("winning", len(region.states))


def func_simulate(args, settings, report):
    """
    Subcommand: run the safe random walk of a fixed population.

    Args:
        args (Namespace): Parsed CLI arguments.
        settings (Settings): Active settings.
        report (RunReport): Report to fill.
    """
    mdp = parse_mdp(_read(args.input, report))
    runs = settings.get_simulation("runs") if args.runs is None else args.runs
    max_steps = settings.get_simulation("max_steps") if args.max_steps is None else args.max_steps
    seed = settings.get_simulation("seed") if args.seed is None else args.seed
    budget = args.budget or settings.get_limit("oracle_configurations")
    report.seed = seed
    report.set("tokens", args.tokens)
    with report.phase("oracle"):
        region = winning_region(mdp, args.tokens, budget=budget)
    report.answer = region.contains_start()
    if not report.answer:
        report.set("reason", "start configuration is not winning")
        return
    with report.phase("simulate"):
        result = simulate(mdp, args.tokens, runs, max_steps, seed,
                          max_processes=args.max_processes, region=region)
    report.set("runs", result.runs)
    report.set("successes", result.successes)
    report.set("failures", result.failures)
    report.set("median_steps", result.median_steps())
    report.set("histogram", [f"{steps}x{count}" for steps, count in result.histogram.items()])


def func_flow(args, settings, report):
    """
    Subcommand: decide a sequential flow instance.

    Args:
        args (Namespace): Parsed CLI arguments.
        settings (Settings): Active settings.
        report (RunReport): Report to fill.
    """
    instance = parse_flow_instance(_read(args.input, report))
    report.set("states", instance.mdp.num_states)
    report.set("arena", len(instance.arena))
    report.set("largest_constant", instance.largest_constant)
    with report.phase("flow"):
        report.answer = solve_sequential_flow(
            instance, shortcuts=args.shortcuts, prune=args.prune,
            budget=settings.get_limit("semigroup_elements"))
    if args.oracle is not None:
        with report.phase("oracle"):
            pairs = bounded_path_oracle(instance, args.oracle,
                                        budget=settings.get_limit("path_configurations"))
        report.set("oracle", [f"{tokens}:{'true' if ok else 'false'}" for tokens, ok in pairs])


def func_semigroup(args, settings, report):
    """
    Subcommand: close the flow semigroup of an instance.

    Args:
        args (Namespace): Parsed CLI arguments.
        settings (Settings): Active settings.
        report (RunReport): Report to fill.
    """
    instance = parse_flow_instance(_read(args.input, report))
    initial = instance.initial
    if instance.needs_reduction:
        initial = reduced_initial(instance.initial)
        instance = reduce_to_constant_one(instance)
        report.set("reduced_states", instance.mdp.num_states)
    with report.phase("semigroup"):
        semigroup = semigroup_for(instance, prune=args.prune,
                                  budget=settings.get_limit("semigroup_elements"))
    if semigroup is None:
        report.answer = False
        report.set("generators", 0)
        return
    report.answer = decide_flow_condition(semigroup, initial, instance.target_states())
    report.set("generators", len(semigroup.generators))
    report.set("elements", len(semigroup))
    report.set("products", semigroup.products)
    report.set("iterations", semigroup.iterations)
    if args.audit:
        report.set("closed", semigroup.audit())
    if args.dump:
        report.appendix = dump_semigroup(semigroup)


def _gadget_spec(args, settings) -> GadgetSpec:
    if args.kind == "countdown":
        if args.game is None:
            raise InputError("countdown needs --game FILE")
        game = parse_countdown_game(args.game.read_text(encoding="utf-8"))
        return GadgetSpec("countdown", {"game": game,
                                        "cap": settings.get_limit("countdown_constant")})
    params = {}
    if args.kind == "bottleneck":
        params["capacity"] = args.k
    if args.kind in ("chain", "leaky_chain"):
        params["length"] = args.len
    return GadgetSpec(args.kind, params)


def func_gadget(args, settings, report):
    """
    Subcommand: emit a gadget MDP.

    Args:
        args (Namespace): Parsed CLI arguments.
        settings (Settings): Active settings.
        report (RunReport): Report to fill.
    """
    if args.list or args.kind is None:
        report.set("kinds", sorted(KINDS))
        report.set("corpus", [spec.label for spec in CORPUS])
        return
    if args.output is None:
        raise InputError("gadget needs -o FILE")
    try:
        spec = _gadget_spec(args, settings)
        mdp = build(spec)
    except ValueError as e:
        raise InputError(str(e)) from e
    text = render_mdp(mdp)
    report.digest = digest(text.encode("utf-8"))
    report.set("gadget", spec.label)
    report.set("states", mdp.num_states)
    report.set("actions", mdp.num_actions)
    if spec.kind == "countdown":
        report.answer = countdown_winner(spec.params["game"])
    args.output.write_text(text, encoding="utf-8")
    report.set("output", str(args.output))


def is_valid_file(value: str):
    """
    Argparse validator: ensure argument points to an existing file.

    Args:
        value (str): Path to the file.

    Returns:
        Path: Validated Path object.

    Raises:
        argparse.ArgumentTypeError: If the path does not exist or is not a file.
    """
    file_ = Path(value)
    if file_.is_file():
        return file_
    raise argparse.ArgumentTypeError(f"File {value} doesn't exist!")


def non_negative(value: str):
    """Argparse validator for counts."""
    try:
        number = int(value)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"{value} is not a number") from e
    if number < 0:
        raise argparse.ArgumentTypeError(f"{value} must not be negative")
    return number


def arguments(args=None):
    """
    Define CLI arguments and subcommands.

    Args:
        args (list[str] | None): Argument list to parse. Defaults to sys.argv if None.

    Returns:
        argparse.Namespace: Parsed command-line arguments.
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config-file', type=is_valid_file)
    common.add_argument('-v', '--verbose', action='store_true', help="Show debug logging.")
    common.add_argument('--timings', action='store_true',
                        help="Append per-phase timings to the report.")

    parser = ArgumentParser(prog="popctl", epilog=GRAMMAR,
                            formatter_class=argparse.RawDescriptionHelpFormatter)
    subparsers = parser.add_subparsers(dest='command', required=True,
                                       help='subcommand help', parser_class=ArgumentParser)

    parser_decide = subparsers.add_parser('decide', parents=[common],
                                          help='Decide control for arbitrarily many tokens')
    parser_decide.add_argument("input", type=is_valid_file)
    parser_decide.add_argument('--shuffle-seed', type=int,
                               help="Shuffle the removal order; the answer does not change.")
    parser_decide.set_defaults(func=func_decide)

    parser_oracle = subparsers.add_parser('oracle', parents=[common],
                                          help='Decide control for a fixed number of tokens')
    parser_oracle.add_argument("input", type=is_valid_file)
    parser_oracle.add_argument('--tokens', type=non_negative, required=True)
    parser_oracle.add_argument('--budget', type=non_negative,
                               help="Cap on explored configurations.")
    parser_oracle.set_defaults(func=func_oracle)

    parser_simulate = subparsers.add_parser('simulate', parents=[common],
                                            help='Run the safe random walk')
    parser_simulate.add_argument("input", type=is_valid_file)
    parser_simulate.add_argument('--tokens', type=non_negative, required=True)
    parser_simulate.add_argument('--runs', type=non_negative)
    parser_simulate.add_argument('--max-steps', type=non_negative)
    parser_simulate.add_argument('--seed', type=int)
    parser_simulate.add_argument('--budget', type=non_negative,
                                 help="Cap on explored configurations.")
    parser_simulate.add_argument('--max-processes', '--threads', type=int, default=cpu_count(),
                                 help="Limits the number of worker processes. "
                                 "Defaults to the available CPU cores.")
    parser_simulate.set_defaults(func=func_simulate)

    parser_flow = subparsers.add_parser('flow', parents=[common],
                                        help='Decide a sequential flow instance')
    parser_flow.add_argument("input", type=is_valid_file)
    parser_flow.add_argument('--shortcuts', action=argparse.BooleanOptionalAction, default=True)
    parser_flow.add_argument('--prune', action='store_true',
                             help="Generate the semigroup from the maximal action flows only.")
    parser_flow.add_argument('--oracle', type=non_negative, metavar='N',
                             help="Also search explicitly for up to N tokens per ω-entry.")
    parser_flow.set_defaults(func=func_flow)

    parser_gadget = subparsers.add_parser('gadget', parents=[common],
                                          help='Emit a gadget MDP')
    parser_gadget.add_argument("kind", nargs='?', choices=sorted(KINDS))
    parser_gadget.add_argument('--list', action='store_true', help="List gadget kinds.")
    parser_gadget.add_argument('--k', type=int, default=1, help="Bottleneck capacity.")
    parser_gadget.add_argument('--len', type=int, default=2, help="Chain length.")
    parser_gadget.add_argument('--game', type=is_valid_file, help="Countdown game file.")
    parser_gadget.add_argument('-o', '--output', type=Path)
    parser_gadget.set_defaults(func=func_gadget)

    parser_semigroup = subparsers.add_parser('semigroup', parents=[common],
                                             help='Close the flow semigroup of an instance')
    parser_semigroup.add_argument("input", type=is_valid_file)
    parser_semigroup.add_argument('--dump', action='store_true', help="Print every element.")
    parser_semigroup.add_argument('--prune', action='store_true',
                                  help="Keep only the maximal action flows as generators.")
    parser_semigroup.add_argument('--audit', action='store_true',
                                  help="Check closure under product and iteration.")
    parser_semigroup.set_defaults(func=func_semigroup)

    return parser.parse_args(args)


def setup_logging(verbose: bool):
    """Route library logging through rich on stderr."""
    handler = RichHandler(console=Console(stderr=True, color_system=None),
                          show_time=False, show_path=False)
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING,
                        format="%(message)s", handlers=[handler], force=True)


def main(argv=None):
    """
    Entry point for the popctl CLI.

    Parses arguments, loads the settings and dispatches to the selected
    subcommand.

    Returns:
        int: Exit code (0 answer computed, 1 input error, 2 inconclusive).
    """
    args = arguments(argv)
    setup_logging(args.verbose)
    console = Console(color_system=None)
    report = RunReport(args.command)
    code = EXIT_OK
    try:
        settings = Settings(args.config_file)
        activate(settings)
        log.debug("settings schema %s", settings.get_schema_version())
        args.func(args, settings, report)
        if report.status == STATUS_INCONCLUSIVE:
            code = EXIT_INCONCLUSIVE
    except ConfigNotSupportedError as e:
        report.status = STATUS_ERROR
        report.set("error", f"configuration not supported: {e}")
        code = EXIT_INPUT
    except (InputError, UnicodeDecodeError) as e:
        report.status = STATUS_ERROR
        report.set("error", str(e))
        code = EXIT_INPUT
    except BudgetExceededError as e:
        report.status = STATUS_INCONCLUSIVE
        report.answer = None
        report.set("reason", str(e))
        code = EXIT_INCONCLUSIVE
    finally:
        activate(None)
    console.out(report.render(timings=args.timings), end="", highlight=False)
    if code == EXIT_INPUT and report.details.get("error", "").startswith("line"):
        sys.stderr.write(GRAMMAR)
    return code


if __name__ == '__main__':
    sys.exit(main())
