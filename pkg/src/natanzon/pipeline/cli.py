import argparse
import json
import logging
import sys

from natanzon.__about__ import __version__
import natanzon.errors as nzerr
from natanzon.errors import NatanzonException
from natanzon.csv import FORMATS, write_table
from natanzon.pipeline.config import load_config, PARAMETER_NAMES
from natanzon.pipeline.pipeline import Pipeline

logger = logging.getLogger(__name__)

class ArgumentParser(argparse.ArgumentParser):
    """argparse parser whose usage errors become UsageError (exit code 1)"""
    def error(self, message):
        raise nzerr.UsageError(f"{self.prog}: {message}")

parser = ArgumentParser(
          prog='natanzon',
          description='Spectra and Green\'s functions of the confluent Natanzon potentials')
parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)

subparsers = parser.add_subparsers(help='sub-command help', dest='command', title='subcommands',
                                   parser_class=ArgumentParser)

parent_parser = ArgumentParser(add_help=False)
parent_parser.add_argument('-c', '--config', metavar='CONFIG', type=str, dest='config_file',
                    help='YAML configuration file. Command line values win over the file.')
parent_parser.add_argument('-v', '--verbose', action='store_true', dest='verbose')
parent_parser.add_argument('--loglevel',
                           dest='log_level',
                           default='WARNING',
                           choices=logging._nameToLevel.keys(),
                           help='Set the logging level.')
parent_parser.add_argument('--format', dest='format', choices=FORMATS, default=None,
                           help='Output format (default csv)')

params_parser = ArgumentParser(add_help=False)
for name in PARAMETER_NAMES:
    params_parser.add_argument(f'--{name}', type=float, dest=name, default=None)

potential_parser = subparsers.add_parser('potential', help='Tabulate r, h(r) and V(r)',
                                         parents=[parent_parser, params_parser])
potential_parser.add_argument('--r', type=float, nargs='+', dest='r', help='Points r')
potential_parser.add_argument('--r-min', type=float, dest='r_min')
potential_parser.add_argument('--r-max', type=float, dest='r_max')
potential_parser.add_argument('--count', type=int, dest='count')

spectrum_parser = subparsers.add_parser('spectrum', help='Bound-state energies',
                                        parents=[parent_parser, params_parser])
spectrum_parser.add_argument('--n-max', type=int, dest='n_max')

green_parser = subparsers.add_parser('green', help='Green\'s function G(r, r\'; epsilon)',
                                     parents=[parent_parser, params_parser])
green_parser.add_argument('--r', type=float, nargs='+', dest='r')
green_parser.add_argument('--r-prime', type=float, nargs='+', dest='r_prime')
green_parser.add_argument('--epsilon', type=float, dest='epsilon')

verify_parser = subparsers.add_parser('verify', help='Run the built-in verification suite',
                                      parents=[parent_parser])
verify_parser.add_argument('--tolerance-factor', type=float, dest='tolerance_factor')
verify_parser.add_argument('--bch-a-scale', type=float, dest='bch_a_scale')

def catch_and_log(func):
    """Decorator to catch and log exceptions, returning the exit code"""
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except NatanzonException as e:
            logger.fatal(e)
            logger.debug("Exception info", exc_info=True)
            return e.exit_code
        except Exception as e:
            logger.fatal(e)
            logger.debug("Exception info", exc_info=True)
            return 3

    return wrapper

def overrides_from_args(args: argparse.Namespace) -> dict[str, dict[str, any]]:
    """Command line values, keyed like the YAML configuration"""
    get = lambda name: getattr(args, name, None)
    return {
        "parameters": {name: get(name) for name in PARAMETER_NAMES},
        "potential": {"r": get("r") if args.command == 'potential' else None,
                      "r min": get("r_min"), "r max": get("r_max"), "count": get("count")},
        "spectrum": {"n max": get("n_max")},
        "green": {"r": get("r") if args.command == 'green' else None,
                  "r prime": get("r_prime"), "epsilon": get("epsilon")},
        "verify": {"tolerance factor": get("tolerance_factor"), "bch a scale": get("bch_a_scale")},
        "output": {"format": get("format")}
    }

@catch_and_log
def main(argv: list[str] = None) -> int:
    try:
        args = parser.parse_args(argv)
    except nzerr.UsageError:
        setup_logger()
        raise
    if args.command is None:
        # --loglevel only exists on the subcommands
        setup_logger()
        parser.print_help(sys.stderr)
        return 1
    setup_logger(args.log_level)

    config = load_config(args.config_file, overrides_from_args(args))
    pipeline = Pipeline(config)

    if args.command == 'potential':
        write_table(pipeline.potential_table(), config.output_format, sys.stdout)
    elif args.command == 'spectrum':
        write_table(pipeline.spectrum_table(), config.output_format, sys.stdout)
    elif args.command == 'green':
        write_table(pipeline.green_table(), config.output_format, sys.stdout)
    elif args.command == 'verify':
        summary = pipeline.verify()
        json.dump(summary, sys.stdout, indent=2)
        sys.stdout.write("\n")
        if not summary["passed"]:
            raise nzerr.VerificationFailed([c["name"] for c in summary["checks"] if not c["passed"]])
    if args.verbose:
        allgood()
    return 0

def run():
    sys.exit(main())

def setup_logger(log_level: str = 'WARNING'):
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(CustomFormatter())

    logger = logging.getLogger()
    logger.setLevel(logging._nameToLevel[log_level])
    for h in list(logger.handlers):
        if isinstance(h.formatter, CustomFormatter):
            logger.removeHandler(h)
    logger.addHandler(handler)

def allgood():
    ok_green = '\033[32m'
    end = '\033[0m'
    print(ok_green + "All good!" + end, file=sys.stderr)

# https://stackoverflow.com/questions/384076/how-can-i-color-python-logging-output
class CustomFormatter(logging.Formatter):

    grey = "\x1b[38;20m"
    yellow = "\x1b[33;20m"
    red = "\x1b[31;20m"
    bold_red = "\x1b[31;1m"
    reset = "\x1b[0m"
    format = "%(levelname)s - %(name)s - %(message)s "

    FORMATS = {
        logging.DEBUG: grey + format + reset,
        logging.INFO: grey + format + reset,
        logging.WARNING: yellow + format + reset,
        logging.ERROR: red + format + reset,
        logging.CRITICAL: bold_red + format + reset
    }

    def format(self, record):
        log_fmt = self.FORMATS.get(record.levelno)
        formatter = logging.Formatter(log_fmt)
        return formatter.format(record)
