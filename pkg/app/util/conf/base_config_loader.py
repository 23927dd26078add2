from os.path import dirname, expanduser, join, realpath

from app.util import autoversioning
from app.util.conf.config_file import ConfigFile


BASE_CONFIG_FILE_SECTION = 'general'


class BaseConfigLoader(object):

    CONFIG_FILE_SECTION = ''  # Override value in subclasses to load additional config.

    def configure_defaults(self, conf):
        """
        This is the base configuration. All default configuration values belong here. These values
        may be overridden by other configurations.
        :type conf: Configuration
        """
        root_directory = dirname(dirname(dirname(dirname(realpath(__file__)))))
        conf.set('root_directory', root_directory)
        conf.set('version', autoversioning.get_version())

        base_directory = join(expanduser('~'), '.probebench')
        conf.set('base_directory', base_directory)
        # The config file location cannot come from the file it refers to
        conf.set('config_file', join(base_directory, 'probebench.conf'))

        conf.set('log_level', 'INFO')
        conf.set('log_filename', None)  # no file log unless configured
        conf.set('log_file', None)
        conf.set('max_log_file_size', 1024 * 1024 * 50)  # 50mb
        conf.set('max_log_file_backups', 5)

    def configure_postload(self, conf):
        """
        After the config file has been loaded, generate the paths which descend from the base_directory.
        :type conf: Configuration
        """
        log_dir = join(conf.get('base_directory'), 'log')
        conf.set('log_dir', log_dir)
        log_filename = conf.get('log_filename')
        conf.set('log_file', join(log_dir, log_filename) if log_filename else None)

    def load_from_config_file(self, config, config_filename):
        """
        Overlay the values of the config file on the defaults. A missing file leaves the defaults in place.

        :type config: Configuration
        :type config_filename: str
        """
        config_file = ConfigFile(config_filename)
        if not config_file.exists():
            return
        config_parsed = config_file.read_config_from_disk()
        self._load_section(config, config_filename, config_parsed, BASE_CONFIG_FILE_SECTION, required=True)
        if self.CONFIG_FILE_SECTION:
            self._load_section(config, config_filename, config_parsed, self.CONFIG_FILE_SECTION, required=False)

    def _get_config_file_whitelisted_keys(self):
        """
        Return the list of keys that we allow to be specified in a config file. Subclasses can override this method but
        should in general append values to the list returned by their superclass.

        :rtype: list[str]
        """
        return [
            'base_directory',
            'log_level',
            'log_filename',
            'max_log_file_size',
            'max_log_file_backups',
        ]

    def _load_section(self, config, config_filename, config_parsed, section, required):
        """
        Copy all the values in one section of a parsed config file to the Configuration singleton.

        :type config: Configuration
        :type config_filename: str
        :type config_parsed: configobj.ConfigObj | dict
        :type section: str
        :param required: raise if the section is missing
        :type required: bool
        """
        if section not in config_parsed:
            if required:
                raise InvalidConfigError('The config file {} does not contain a [{}] section'
                                         .format(config_filename, section))
            return

        whitelisted_file_keys = self._get_config_file_whitelisted_keys()
        for key, value in config_parsed[section].items():
            if key not in whitelisted_file_keys:
                raise InvalidConfigError('The config file contains an invalid key: {}'.format(key))
            self._cast_and_set(key, value, config)

    def _cast_and_set(self, key, value, config):
        """
        Cast a value read from the file to the type of the key's default.

        :type key: str
        :type value: str | list[str]
        :type config: Configuration
        """
        default_value = config.get(key)

        try:
            if isinstance(default_value, bool):  # bool is a subclass of int so should be checked first
                value_mapping = {'true': True, 'false': False}
                if not isinstance(value, str) or value.lower() not in value_mapping:
                    raise InvalidConfigError(
                        'The value for {} should be True or False, but it is "{}"'.format(key, value))
                config.set(key, value_mapping[value.lower()])

            elif isinstance(default_value, int):
                config.set(key, int(value))

            elif isinstance(default_value, float):
                config.set(key, float(value))

            elif isinstance(default_value, list):
                # ConfigObj only produces a list when the value has a comma
                config.set(key, value if isinstance(value, list) else [value])

            else:  # str or NoneType
                if value.startswith('~'):
                    value = expanduser(value)
                config.set(key, value)
        except (TypeError, ValueError) as ex:
            raise InvalidConfigError('The value "{}" is not valid for {}'.format(value, key)) from ex


class InvalidConfigError(Exception):
    """
    The config file has a missing section, an unknown key or a value of the wrong type.
    """
