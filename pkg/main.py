"""Main entry point for the spin-wave memory simulator."""

import argparse
import logging
import sys

from simulator import SCENARIOS, config_parser, run_scenario
from utils.errors import ConfigError, SpinWaveLabError

logger = logging.getLogger('spinwave-lab')

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='spinwave-lab',
                                     description='Wavevector-multiplexed spin-wave memory simulator')
    parser.add_argument('scenario', nargs='?', help='Scenario to run (see --list)')

    # Configuration sources
    parser.add_argument('--config', type=str, help='Path to a JSON file with parameter values')
    parser.add_argument('--set', dest='overrides', action='append', default=[], metavar='KEY=VALUE',
                        help='Override one parameter (repeatable)')
    parser.add_argument('--out', type=str, default='results', help='Output directory for artifacts')
    parser.add_argument('--seed', type=int, help='Root random seed')

    # Output control
    parser.add_argument('--gnuplot-hints', action='store_true', help='Write a plotting hint file per table')
    parser.add_argument('--list', action='store_true', help='List the scenarios and exit')
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('--verbose', action='store_true', help='Log debug messages')
    verbosity.add_argument('--quiet', action='store_true', help='Log warnings and errors only')
    return parser


def configure_logging(verbose: bool = False, quiet: bool = False):
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format='[%(levelname)s] %(message)s', force=True)


def main(argv=None) -> int:
    """Main entry point for the simulator."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose, args.quiet)

    if args.list:
        for name, scenario in SCENARIOS.items():
            print(f"{name:<22}{scenario.description}")
        return EXIT_OK

    if not args.scenario:
        logger.error("No scenario given. Use --list to see the available scenarios.")
        return EXIT_USAGE

    try:
        config = config_parser().parse(args.scenario, args.config, args.overrides, args.out, args.seed)
    except ConfigError as e:
        logger.error("%s", e)
        return EXIT_USAGE

    try:
        result = run_scenario(config, args.gnuplot_hints)
    except ConfigError as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except (SpinWaveLabError, FloatingPointError) as e:
        logger.error("Scenario %s failed: %s", config.scenario, e)
        return EXIT_NUMERICAL

    logger.info("Scenario %s complete, manifest at %s", result.scenario, result.manifest)
    for key, value in sorted(result.summary.items()):
        logger.info("  %s = %s", key, value)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
