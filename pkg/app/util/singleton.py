from threading import RLock


class Singleton(object):
    """
    Base class for process-wide objects (the Configuration and the UnhandledExceptionHandler). Get the instance with
    singleton(); constructing a second instance directly is an error.
    """

    _instance_lock = RLock()
    _singleton_instance = None

    @classmethod
    def singleton(cls):
        """
        :return: the instance, created on first use
        """
        with cls._instance_lock:
            if cls._singleton_instance is None:
                cls._singleton_instance = cls()
        return cls._singleton_instance

    @classmethod
    def reset_singleton(cls):
        """
        Drop the instance so that the next singleton() call creates a fresh one. Unit tests do this before every test.
        """
        with cls._instance_lock:
            cls._singleton_instance = None

    def __init__(self):
        with self._instance_lock:
            if self._singleton_instance is not None:
                raise SingletonError('{} is a singleton; use {}.singleton() instead of constructing it.'.format(
                    type(self).__name__, type(self).__name__))


class SingletonError(Exception):
    """
    A second instance of a singleton was constructed.
    """
