from queue import LifoQueue
import signal
from threading import current_thread, Lock, main_thread

from app.util import log
from app.util.singleton import Singleton


class UnhandledExceptionHandler(Singleton):
    """
    Catch and log exceptions that escape a block of code, then run the registered teardown callbacks (e.g., shutting
    down a worker pool). It is a singleton because teardown callbacks have process-wide effects.

    Use it as a context manager on the main thread:
    >>> with UnhandledExceptionHandler.singleton():
    >>>     # code which may throw an exception goes here!
    """

    HANDLED_EXCEPTION_EXIT_CODE = 1

    _signal_names = {
        signal.SIGINT: 'SIGINT',
        signal.SIGTERM: 'SIGTERM',
    }

    def __init__(self):
        super().__init__()
        self._handling_lock = Lock()
        self._teardown_callback_stack = LifoQueue()  # callbacks run in the reverse order that they were added
        self._logger = log.get_logger(__name__)

        # Raises on a non-main thread, so this singleton must be created on the main thread.
        signal.signal(signal.SIGTERM, self._application_teardown_signal_handler)
        signal.signal(signal.SIGINT, self._application_teardown_signal_handler)

    @classmethod
    def reset_signal_handlers(cls):
        """
        Restore default signal handling. Worker processes call this so that only the parent tears down.
        """
        for signal_num in cls._signal_names:
            signal.signal(signal_num, signal.SIG_DFL)

    def add_teardown_callback(self, callback, *callback_args, **callback_kwargs):
        """
        Add a callback to be executed in the event of application teardown.

        :param callback: The method callback to execute
        :type callback: callable
        """
        self._teardown_callback_stack.put((callback, callback_args, callback_kwargs))

    def remove_teardown_callback(self, callback):
        """
        Drop every registration of callback, once the resource it tears down has been released normally.

        :type callback: callable
        """
        with self._teardown_callback_stack.mutex:
            self._teardown_callback_stack.queue[:] = [
                entry for entry in self._teardown_callback_stack.queue if entry[0] != callback]

    def _application_teardown_signal_handler(self, sig, frame):
        self._logger.info('{} signal received. Triggering teardown.', self._signal_names[sig])
        raise AppTeardown

    def __enter__(self):
        pass

    def __exit__(self, exc_type, exc_value, traceback):
        """
        If the block raised, log the exception (unless it is an expected exit) and run the teardown callbacks. On the
        main thread a SystemExit passes through and anything else, interrupts included, becomes SystemExit(1).
        """
        if not exc_value:
            return True

        with self._handling_lock:
            if not isinstance(exc_value, (SystemExit, AppTeardown, KeyboardInterrupt)):
                self._logger.exception('Unhandled exception handler caught exception.')

            while not self._teardown_callback_stack.empty():
                callback, args, kwargs = self._teardown_callback_stack.get()
                self._logger.debug('Executing teardown callback: {}', callback)
                try:
                    callback(*args, **kwargs)
                except:  # pylint: disable=bare-except
                    self._logger.exception('Exception raised by teardown callback {}', callback)

        if current_thread() is main_thread():
            if isinstance(exc_value, SystemExit):
                raise exc_value
            # An interrupted run wrote no results, so it fails too
            raise SystemExit(self.HANDLED_EXCEPTION_EXIT_CODE)

        # Do not re-raise exc_value on the current thread
        return True


class AppTeardown(BaseException):
    """
    Trigger application teardown from a signal handler. It derives from BaseException so library code catching
    Exception does not swallow it.
    """
