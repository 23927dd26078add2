#!/usr/bin/env python3

from setuptools import find_packages, setup

from app.util import autoversioning

version = autoversioning.get_version()


def _read_requirements(filename):
    # requirements.txt is pip-compiled; keep only the pinned lines.
    with open(filename) as requirements_file:
        lines = (line.split('#', 1)[0].strip() for line in requirements_file)
        return [line for line in lines if line]


requirements = _read_requirements('requirements.txt')

name = 'probebench'

setup(
    name=name,
    version=version,
    description="Seeded experiments comparing elastic, funnel and uniform-probing open-addressing hash tables.",
    license="ASL 2.0",

    python_requires='>=3.8',
    packages=find_packages(exclude=('test', 'test.*')),
    # Data files are packaged into the wheel using the following defines.
    data_files=[
        ('', ['requirements.txt']),
        ('conf', ['conf/default_probebench.conf']),
    ],
    install_requires=requirements,
    entry_points={
        'console_scripts': ['{} = app.__main__:main'.format(name)],
    },
)
