#!/usr/bin/env python

import sys

from setuptools import setup, find_packages

if not sys.version_info[0] == 3:
    print('only python3 supported!')
    sys.exit(1)

setup(
    name='onoffPRIVACY',
    version='1.0.0',
    description='Rate-optimal private retrieval of correlated requests with per-step ON-OFF privacy',
    install_requires=['numpy>=1.17', 'scipy>=1.0', 'mock'],
    packages=find_packages(exclude=['tests']),
    test_suite='tests',
    zip_safe=False,
    include_package_data=True,
    classifiers=[
        "Programming Language :: Python :: 3",
        "Development Status :: 4 - Beta",
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: Apache Software License",
        "Operating System :: POSIX :: Linux",
        "Topic :: Security :: Cryptography",
    ],
)
