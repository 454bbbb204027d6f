# -*- encoding: utf-8 -*-
# Copyright (c) 2015, Nicolas Despres

from setuptools import setup
import os
import codecs

ROOT_DIR = os.path.dirname(__file__)

def read(*rnames):
    with codecs.open(os.path.join(ROOT_DIR, *rnames),
                     mode="r",
                     encoding="utf-8") as stream:
        return stream.read()

def read_version():
    for line in read("onebatchpam", "__init__.py").splitlines():
        if line.startswith("__version__"):
            return line.split("=")[1].strip().strip('"')
    raise RuntimeError("cannot find __version__")

setup(
    name="onebatchpam",
    version=read_version(),
    packages=["onebatchpam", "onebatchpam.test"],
    py_modules=[],
    install_requires=[
        "numpy>=1.17",
        "scipy>=1.4",
        "pandas>=1.1",
    ],
    # Shell completion is a soft dependency users can opt-in or not.
    extras_require={
        "completion": ["argcomplete"],
    },
    # Generate a command line interface driver.
    entry_points={
        'console_scripts': [
            "onebatchpam=onebatchpam.cli:sys_main",
        ],
    },
    # How to run the test suite.
    test_suite='onebatchpam.test',
    # What it does, who wrote it and where to find it.
    description="Fast k-medoids clustering from a single batch of "
    "dissimilarities, with baselines and a benchmark harness",
    long_description=read('README.rst'),
    author="Nicolas Despres",
    author_email='nicolas.despres@gmail.com',
    license="Simplified BSD",
    keywords='clustering k-medoids pam fasterpam clara kmeans++ benchmark',
    # Pick some from https://pypi.python.org/pypi?%3Aaction=list_classifiers
    classifiers = [
        'Development Status :: 4 - Beta',
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: BSD License',
        'Natural Language :: English',
        'Operating System :: OS Independent',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: Implementation :: CPython',
        'Topic :: Scientific/Engineering :: Information Analysis',
    ],
)
