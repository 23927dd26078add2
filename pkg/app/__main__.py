#!/usr/bin/env python

import sys

from app.bench.run_spec import Detail, OutputFormat
from app.common.insert_record import Scheme
from app.subcommands.run_subcommand import RunSubcommand
from app.subcommands.sweep_subcommand import SweepSubcommand
from app.subcommands.verify_subcommand import VerifySubcommand
from app.util import autoversioning, log
from app.util.argument_parsing import ProbeBenchArgumentParser, ProbeBenchHelpFormatter
from app.util.conf.bench_config_loader import BenchConfigLoader
from app.util.conf.base_config_loader import InvalidConfigError
from app.util.conf.configuration import Configuration
from app.util.exceptions import UsageError
from app.util.unhandled_exception_handler import UnhandledExceptionHandler

USAGE_ERROR_EXIT_CODE = 2


def _parse_args(args):
    parser = ProbeBenchArgumentParser(description='Seeded experiments on open-addressing hash tables.')
    parser.add_argument(
        '-V', '--version',
        action='version', version='probebench ' + autoversioning.get_version())

    subparsers = parser.add_subparsers(
        title='Commands',
        description='See "{} <command> --help" for more info on a specific command.'.format(sys.argv[0]),
        dest='subcommand',
    )
    subparsers.required = True

    scheme_names = ', '.join(str(scheme) for scheme in Scheme)

    run_parser = subparsers.add_parser(
        'run',
        help='Run seeded trials of one scheme at one capacity and load.', formatter_class=ProbeBenchHelpFormatter)
    run_parser.add_argument(
        '--scheme', required=True,
        help='the table scheme: {}'.format(scheme_names))
    run_parser.add_argument(
        '--n', type=int, required=True,
        help='the capacity in slots, a power of two between 2^6 and 2^26')
    run_parser.add_argument(
        '--log2-inv-delta', type=int, required=True,
        help='k, where the table ends with a free fraction delta = 2^-k (1 <= k <= 12)')
    run_parser.add_argument(
        '--detail',
        choices=[str(detail) for detail in Detail], default=str(Detail.AGGREGATE),
        help='one row per insertion, or one aggregate row')
    run_parser.set_defaults(subcommand_class=RunSubcommand)

    sweep_parser = subparsers.add_parser(
        'sweep',
        help='Run every combination of schemes, capacities and loads and write one aggregate row for each.',
        formatter_class=ProbeBenchHelpFormatter)
    sweep_parser.add_argument(
        '--scheme', required=True,
        help='a comma separated list of table schemes ({})'.format(scheme_names))
    sweep_parser.add_argument(
        '--n', required=True,
        help='a comma separated list of capacities, each a power of two between 2^6 and 2^26')
    sweep_parser.add_argument(
        '--log2-inv-delta', required=True,
        help='k, or an inclusive range of k such as 2:8')
    sweep_parser.set_defaults(subcommand_class=SweepSubcommand)

    for subparser in (run_parser, sweep_parser):
        subparser.add_argument(
            '--trials', type=int,
            help='the number of independent trials; read from conf if unspecified, and defaults to 1')
        subparser.add_argument(
            '--seed', type=int,
            help='the master seed; trial t uses a seed derived from it. Defaults to 0')
        subparser.add_argument(
            '--c', type=int,
            help='the constant of the elastic probe budget; read from conf if unspecified, and defaults to 4')
        subparser.add_argument(
            '--format', dest='output_format',
            choices=[str(output_format) for output_format in OutputFormat], default=str(OutputFormat.CSV),
            help='the output format')
        subparser.add_argument(
            '--out',
            help='the output file, written atomically; standard output if unspecified')
        subparser.add_argument(
            '--allow-failures',
            action='store_true',
            help='exit with status 0 even if some trials fail')

    verify_parser = subparsers.add_parser(
        'verify',
        help='Check the invariants and statistical properties of every scheme.',
        formatter_class=ProbeBenchHelpFormatter)
    verify_parser.add_argument(
        '--fast',
        action='store_true',
        help='skip the Monte-Carlo sweeps')
    verify_parser.set_defaults(subcommand_class=VerifySubcommand)

    for subparser in (run_parser, sweep_parser, verify_parser):
        subparser.add_argument(
            '--jobs', type=int,
            help='the number of worker processes for trials; read from conf if unspecified, and defaults to 1')
        subparser.add_argument(
            '--metrics-file',
            help='write Prometheus metrics of the run to this file')
        subparser.add_argument(
            '-v', '--verbose',
            action='store_const', const='DEBUG', dest='log_level', help='set the log level to "debug"')
        subparser.add_argument(
            '-q', '--quiet',
            action='store_const', const='ERROR', dest='log_level', help='set the log level to "error"')
        subparser.add_argument(
            '-c', '--config-file',
            help='The location of the probebench config file, defaults to ~/.probebench/probebench.conf')

    parsed_args = vars(parser.parse_args(args))  # vars() converts the namespace to a dict
    return parsed_args


def _initialize_configuration(config_filename):
    """
    Load the default conf values, then read overrides from the conf file if there is one.

    :type config_filename: str | None
    """
    conf_loader = BenchConfigLoader()
    config = Configuration.singleton()
    conf_loader.configure_defaults(config)
    config_filename = config_filename or Configuration['config_file']
    conf_loader.load_from_config_file(config, config_filename)
    conf_loader.configure_postload(config)


def main(args=None):
    """
    This is the single entry point of the application. This function feeds the command line parameters as keyword
    args directly into the run() method of the appropriate Subcommand subclass.

    Exit status: 0 on success, 1 on failed trials, failed properties or I/O errors, 2 on usage errors.
    """
    parsed_args = _parse_args(args)
    parsed_args.pop('subcommand')
    try:
        _initialize_configuration(parsed_args.pop('config_file'))
    except (InvalidConfigError, ValueError) as ex:
        log.get_logger(__name__).error(str(ex))
        sys.exit(USAGE_ERROR_EXIT_CODE)
    subcommand_class = parsed_args.pop('subcommand_class')  # defined in _parse_args() by subparser.set_defaults()

    unhandled_exception_handler = UnhandledExceptionHandler.singleton()
    with unhandled_exception_handler:
        try:
            subcommand_class().run(**parsed_args)
        except UsageError as ex:
            log.get_logger(__name__).error(str(ex))
            sys.exit(USAGE_ERROR_EXIT_CODE)


if __name__ == '__main__':
    main()
