import sys

from app.bench.trial_runner import TrialRunner
from app.bench.verification import VerificationSuite
from app.subcommands.subcommand import Subcommand
from app.util.conf.configuration import Configuration

_VERIFY_CONF_KEYS = (
    'probe_cap_factor',
    'lookup_probe_cap',
    'verify_sweep_n',
    'verify_sweep_trials',
    'verify_uniform_n',
    'verify_uniform_trials',
    'verify_replay_n',
)


class VerifySubcommand(Subcommand):

    def run(self, log_level, fast=False, jobs=None, metrics_file=None):
        """
        Check every property of the suite and report each one. Exits with status 1 if any property fails.

        :param fast: skip the Monte-Carlo sweeps
        :type fast: bool
        :param jobs: worker processes for the sweeps
        :type jobs: int | None
        """
        self._configure_logging(log_level)
        jobs = jobs if jobs is not None else Configuration['default_jobs']
        suite = VerificationSuite(
            fast=fast,
            conf_values={key: Configuration[key] for key in _VERIFY_CONF_KEYS},
            runner=TrialRunner(jobs=jobs),
        )
        results = suite.run()
        failed = [result.name for result in results if not result.passed]
        self._write_metrics(metrics_file)
        if failed:
            self._logger.error('{} of {} properties failed: {}', len(failed), len(results), ', '.join(failed))
            sys.exit(1)
        self._logger.info('All {} properties hold.', len(results))
