import sys
import logging
from argparse import ArgumentParser

from src.commands import (COMMANDS, add_output_args, add_grid_args, add_model_args, add_solve_args,
                          add_verify_args, add_continue_args, add_spectrum_args, add_constants_args)
from src.inputters.data_utils import load_config

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')  # - %(name)s
logger = logging.getLogger(__file__)


def build_parser():
    parser = ArgumentParser(description="Non-local ground states, sharp constants and spectra")
    subparsers = parser.add_subparsers(dest="command")
    subparsers.required = True

    solve = subparsers.add_parser("solve", help="Petviashvili ground state of m(D)Q + mu Q = Q^{alpha+1}")
    add_model_args(solve)
    add_grid_args(solve)
    add_solve_args(solve)

    verify = subparsers.add_parser("verify", help="Run the identity and constant checks")
    add_verify_args(verify)

    cont = subparsers.add_parser("continue", help="Follow the ground state branch from s = 1")
    add_continue_args(cont)

    spectrum = subparsers.add_parser("spectrum", help="Spectrum and non-degeneracy of the linearized operator")
    add_model_args(spectrum)
    add_grid_args(spectrum, n_points=1024)
    add_solve_args(spectrum)
    add_spectrum_args(spectrum)

    constants = subparsers.add_parser("constants", help="Kato-Sobolev constants over a theta grid")
    add_constants_args(constants)

    for sub in subparsers.choices.values():
        add_output_args(sub)
    return parser, subparsers


def apply_config(argv, subparsers):
    """Config file values become parser defaults; explicit flags still win."""
    pre = ArgumentParser(add_help=False)
    pre.add_argument("--config", type=str, default=None)
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    config = load_config(known.config)
    for sub in subparsers.choices.values():
        defaults = {}
        for action in sub._actions:
            if action.dest not in config:
                continue
            value = config[action.dest]
            # list options take whitespace separated values
            if action.nargs in ("+", "*") and isinstance(value, str):
                value = [action.type(x) if action.type else x for x in value.split()]
            defaults[action.dest] = value
        sub.set_defaults(**defaults)
    every = {action.dest for sub in subparsers.choices.values() for action in sub._actions}
    unknown = sorted(set(config) - every)
    if unknown:
        raise ValueError("Unknown config keys {}".format(unknown))


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    parser, subparsers = build_parser()
    try:
        apply_config(argv, subparsers)
        args = parser.parse_args(argv)
        logger.info(args)
        return COMMANDS[args.command](args)
    except ValueError as e:
        logger.error("Invalid input: {}".format(e))
        return 2
    except RuntimeError as e:
        logger.error("Numerical failure: {}".format(e))
        return 1


if __name__ == '__main__':
    sys.exit(main())
