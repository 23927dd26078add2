import logging
import os
import sys
import threading

import logbook
import logbook.compat
from termcolor import colored

from app.util import autoversioning, fs
from app.util.conf.configuration import Configuration

# time to the millisecond, pid (tells trial workers apart), level, module, message
_DETAILED_FORMAT = (
    '[{record.time!s:.23}] {record.process} {record.level_name:7} {record.channel:18.18} {record.message}'
)

# Subcommands report through the logger, so their console output is the bare message
_MESSAGE_ONLY_FORMAT = '{record.message}'

_LEVEL_STYLES = {
    logbook.CRITICAL: ('magenta', ['bold']),
    logbook.ERROR: ('red', ['bold']),
    logbook.WARNING: ('yellow', ['bold']),
    logbook.NOTICE: ('yellow', []),
    logbook.INFO: ('cyan', []),
    logbook.DEBUG: ('green', []),
}
# With message-only output, only problems are colored
_MESSAGE_ONLY_STYLED_LEVELS = (logbook.CRITICAL, logbook.ERROR, logbook.WARNING)


def get_logger(logger_name=None):
    """
    Get a logger for a module, once per class or module:
      >>> self._logger = get_logger(__name__)

    Hand the values to the logger instead of formatting them first; records below the active level are then never
    formatted:
      >>> self._logger.warning('Trial {} aborted: {}', trial, failure)

    :param logger_name: usually __name__; the channel is its last component
    :type logger_name: str | None
    :rtype: logbook.Logger
    """
    channel = (logger_name or 'probebench').rsplit('.', 1)[-1]
    return logbook.Logger(channel)


def configure_logging(log_level=None, log_file=None, simplified_console_logs=False):
    """
    Push the application's log handlers. Call once, early, from the process entry point.

    :param log_level: a logbook level name; the configured log_level if None
    :type log_level: str | None
    :param log_file: also log to this file, rotated by size
    :type log_file: str | None
    :param simplified_console_logs: print bare messages on the console
    :type simplified_console_logs: bool
    """
    logbook.set_datetime_format('local')
    # numpy and prometheus_client log through the standard library
    logging.root.setLevel(logging.WARNING)
    logbook.compat.redirect_logging(set_root_logger_level=False)
    # Records below log_level stop here instead of reaching logbook's default stderr handler
    logbook.NullHandler().push_application()

    log_level = log_level or Configuration['log_level']
    if simplified_console_logs:
        styles = {level: _LEVEL_STYLES[level] for level in _MESSAGE_ONLY_STYLED_LEVELS}
        console_format = _MESSAGE_ONLY_FORMAT
    else:
        styles = _LEVEL_STYLES
        console_format = _DETAILED_FORMAT
    _StyledStreamHandler(styles, sys.stdout, level=log_level, format_string=console_format,
                         bubble=True).push_application()

    if log_file:
        _push_file_handler(log_file, log_level)


def _push_file_handler(log_file, log_level):
    fs.create_dir(os.path.dirname(log_file))
    log_file_existed = os.path.exists(log_file)
    handler = _BannerRotatingFileHandler(
        log_file,
        level=log_level,
        format_string=_DETAILED_FORMAT,
        max_size=Configuration['max_log_file_size'],
        backup_count=Configuration['max_log_file_backups'],
        bubble=True,
    )
    handler.push_application()
    # Each run starts a fresh file; the previous run's log becomes the first backup
    if log_file_existed:
        handler.perform_rollover(count_new_file=False)
    else:
        handler.write_banner()


def application_summary(logfile_count):
    """
    The banner at the top of every log file.

    :param logfile_count: how many log files this process has opened, including the current one
    :type logfile_count: int
    :rtype: str
    """
    fields = [
        ('Version', autoversioning.get_version()),
        ('PID', os.getpid()),
    ]
    if logfile_count > 1:
        fields.append(('Log file', '{} of this run'.format(logfile_count)))
    rule = '=' * 48
    body = '\n'.join('probebench {:<10}{}'.format(name + ':', value) for name, value in fields)
    return '\n{rule}\n{body}\n{rule}\n'.format(rule=rule, body=body)


class _StyledStreamHandler(logbook.StreamHandler):
    """
    Colors each formatted record by level with termcolor. Levels without a style print plain.
    """

    def __init__(self, styles, stream, **kwargs):
        super().__init__(stream, **kwargs)
        self._styles = styles

    def format_and_encode(self, record):
        output = super().format_and_encode(record)
        if record.level not in self._styles:
            return output
        color, attrs = self._styles[record.level]
        return colored(output, color, attrs=attrs)


class _BannerRotatingFileHandler(logbook.RotatingFileHandler):
    """
    Opens every log file, including those started by a rollover, with application_summary().
    """

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._file_count = 1
        # The banner is logged while perform_rollover holds this lock
        self.lock = threading.RLock()

    def perform_rollover(self, count_new_file=True):
        super().perform_rollover()
        if count_new_file:
            self._file_count += 1
        self.write_banner()

    def write_banner(self):
        get_logger(__name__).debug(application_summary(self._file_count))
