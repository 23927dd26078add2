import functools

_FALLBACK_VERSION = '0.1.0'
_DISTRIBUTION_NAME = 'probebench'


@functools.lru_cache(maxsize=1)
def get_version():
    """
    Get the version of the application: the installed distribution's version, or the fallback version when running
    from a source checkout that was never installed.

    :return: The version of the application
    :rtype: str
    """
    return _get_installed_package_version() or _FALLBACK_VERSION


def _get_installed_package_version():
    """
    :return: the installed version from the package metadata, or None if the package is not installed
    :rtype: str | None
    """
    try:
        from importlib import metadata
        return metadata.version(_DISTRIBUTION_NAME)
    except Exception:  # pylint: disable=broad-except
        return None
