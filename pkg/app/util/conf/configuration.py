from app.util.singleton import Singleton

_MISSING = object()


class _ConfigurationMetaclass(type):
    """
    Keyed access on the Configuration class itself, delegating to the singleton instance.
    """
    def __getitem__(cls, item):
        return Configuration.singleton().get(item)

    def __setitem__(cls, key, value):
        Configuration.singleton().set(key, value)

    def __contains__(cls, key):
        return key in Configuration.singleton().properties


class Configuration(Singleton, metaclass=_ConfigurationMetaclass):
    """
    The process-wide settings. Defaults come from the config loaders (app.util.conf), overrides from the config file.

    Read settings by key:
    >>> cap = Configuration['lookup_probe_cap']

    Tables and trial workers never read this singleton; the bench layer resolves what they need into a TableConfig.
    """

    def __init__(self, as_instance=False):
        """
        :param as_instance: create a standalone instance instead of the singleton
        :type as_instance: bool
        """
        if not as_instance:
            super().__init__()
        self.properties = {}

    def set(self, name, value):
        self.properties[name] = value
        return self

    def get(self, name, default=_MISSING):
        """
        :param default: returned when name is not set; without it, a missing name raises KeyError
        """
        if default is _MISSING:
            return self.properties[name]
        return self.properties.get(name, default)
