from contextlib import suppress
import os
import tempfile


def create_dir(dir_path):
    """
    Create a directory and its parents. An existing directory is fine.

    :param dir_path: the directory to create; an empty path (the current directory) is left alone
    :type dir_path: str
    """
    if not dir_path:
        return
    try:
        os.makedirs(dir_path, exist_ok=True)
    except FileExistsError:
        pass


def atomic_write_file(file_contents, file_path):
    """
    Write a file so that readers see either the old contents or the complete new contents, never a partial file. The
    contents go to a temporary file in the target directory, which then replaces the target.

    :param file_contents: The string to write
    :type file_contents: str
    :param file_path: The path of the file to write
    :type file_path: str
    """
    file_dir = os.path.dirname(os.path.abspath(file_path))
    create_dir(file_dir)
    file_descriptor, temp_path = tempfile.mkstemp(dir=file_dir, prefix='.probebench-', suffix='.tmp')
    try:
        with os.fdopen(file_descriptor, 'w', encoding='utf-8', newline='') as f:
            f.write(file_contents)
        os.replace(temp_path, file_path)
    except BaseException:
        with suppress(OSError):
            os.remove(temp_path)
        raise
