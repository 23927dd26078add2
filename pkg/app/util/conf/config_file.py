import os

from configobj import ConfigObj, ConfigObjError


class ConfigFile(object):
    """
    An INI-style config file with a [general] section and one section per config loader.
    """

    def __init__(self, filename):
        """
        :type filename: str
        """
        self._filename = filename

    @property
    def filename(self):
        return self._filename

    def exists(self):
        return os.path.isfile(self._filename)

    def read_config_from_disk(self):
        """
        Parse the file.

        :rtype: ConfigObj
        """
        if not self.exists():
            raise FileNotFoundError('Conf file {} does not exist'.format(self._filename))
        try:
            return ConfigObj(self._filename, encoding='utf-8')
        except ConfigObjError as ex:
            raise ValueError('The conf file {} could not be parsed: {}'.format(self._filename, ex)) from ex
