import sys
import time

from app.bench.output_writer import format_output, write_output
from app.common import metrics
from app.util import autoversioning, log
from app.util.conf.configuration import Configuration
from app.util.exceptions import OutputWriteError


class Subcommand(object):

    def __init__(self):
        self._logger = log.get_logger(__name__)

    def run(self, *args, **kwargs):
        raise NotImplementedError

    def _configure_logging(self, log_level):
        """
        :param log_level: the log level at which to do application logging (or None for default log level)
        :type log_level: str | None
        """
        log.configure_logging(
            log_level=log_level or Configuration['log_level'],
            log_file=Configuration['log_file'],
            simplified_console_logs=True,
        )

    def _table_conf_values(self):
        """
        :return: the configured settings that every table of the run shares
        :rtype: dict
        """
        return {
            'probe_cap_factor': Configuration['probe_cap_factor'],
            'lookup_probe_cap': Configuration['lookup_probe_cap'],
        }

    def _emit(self, output_format, columns, rows, output_path, seed, start_time, warnings):
        """
        Render the rows and write them out. An unwritable output path ends the process with exit status 1.
        """
        metadata = {
            'version': autoversioning.get_version(),
            'seed': seed,
            'wall_time': time.time() - start_time,
            'warnings': list(warnings),
        }
        try:
            write_output(format_output(output_format, columns, rows, metadata), output_path)
        except OutputWriteError as ex:
            self._logger.error(str(ex))
            sys.exit(1)
        if output_path:
            self._logger.info('Wrote {} rows to {}.', len(rows), output_path)

    def _write_metrics(self, metrics_file):
        metrics_file = metrics_file or Configuration['metrics_file']
        if metrics_file:
            try:
                metrics.write_metrics(metrics_file)
            except OSError as ex:
                self._logger.error('Could not write metrics to {}: {}', metrics_file, ex)
                sys.exit(1)

    def _exit_on_failures(self, failure_count, allow_failures):
        if failure_count and not allow_failures:
            self._logger.error('{} trials failed. Pass --allow-failures to accept failed trials.', failure_count)
            sys.exit(1)
