import os
from os.path import basename, dirname, relpath

from test.framework.base_unit_test_case import BaseUnitTestCase


class TestTest(BaseUnitTestCase):
    """
    Meta-tests that check the test suite itself is wired up correctly.
    """
    def test_all_test_subdirectories_have_init_py_file(self):
        # Test modules in a directory without an __init__.py import as top-level modules and collide by basename.
        repo_test_dir_path = dirname(dirname(__file__))
        self.assertEqual(basename(repo_test_dir_path), 'test', 'repo_test_dir_path should be the path of the top-level '
                                                               '"test" directory of the repo.')

        exempt_dirs = ['__pycache__', '.hypothesis', '.pytest_cache']
        for dir_path, _, files in os.walk(repo_test_dir_path):
            if any(exempt_dir in dir_path for exempt_dir in exempt_dirs):
                continue

            self.assertIn(
                '__init__.py', files,
                'The test directory "{}" does not appear to have an __init__.py file. Tests in that directory will '
                'not import as part of the "test" package.'.format(relpath(dir_path, repo_test_dir_path)))

    def test_unit_tests_cannot_touch_the_filesystem_unpatched(self):
        from test.framework.base_unit_test_case import UnitTestDisabledMethodError
        from app.util import fs

        with self.assertRaises(UnitTestDisabledMethodError):
            fs.atomic_write_file('a,b\n', '/tmp/out.csv')
