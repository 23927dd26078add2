from app.util.conf.base_config_loader import BaseConfigLoader


class BenchConfigLoader(BaseConfigLoader):

    CONFIG_FILE_SECTION = 'bench'

    def configure_defaults(self, conf):
        """
        Defaults for the run, sweep and verify subcommands. Command-line flags override these.
        :type conf: Configuration
        """
        super().configure_defaults(conf)
        conf.set('elastic_budget_constant', 4)
        conf.set('probe_cap_factor', 64)  # unbounded probe loops stop after factor * |A| * log2(n) probes
        conf.set('lookup_probe_cap', 1 << 20)
        conf.set('default_jobs', 1)
        conf.set('default_seed', 0)
        conf.set('default_trials', 1)
        conf.set('metrics_file', None)

        conf.set('verify_sweep_n', 1 << 18)
        conf.set('verify_sweep_trials', 20)
        conf.set('verify_uniform_n', 1 << 16)
        conf.set('verify_uniform_trials', 200)
        conf.set('verify_replay_n', 1 << 14)

    def _get_config_file_whitelisted_keys(self):
        return super()._get_config_file_whitelisted_keys() + [
            'elastic_budget_constant',
            'probe_cap_factor',
            'lookup_probe_cap',
            'default_jobs',
            'default_seed',
            'default_trials',
            'metrics_file',
            'verify_sweep_n',
            'verify_sweep_trials',
            'verify_uniform_n',
            'verify_uniform_trials',
            'verify_replay_n',
        ]
