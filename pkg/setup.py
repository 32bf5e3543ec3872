#!/usr/bin/env python

"""The setup script."""

from setuptools import setup, find_packages

with open('README.rst') as readme_file:
    readme = readme_file.read()

with open('HISTORY.rst') as history_file:
    history = history_file.read()

requirements = ['numpy>=1.22', 'scipy>=1.12', 'pandas>=1.3', ]

setup_requirements = ['pytest-runner', ]

test_requirements = ['pytest>=3', 'timeout_decorator>=0.5.0', ]

setup(
    author="Hex Informatica",
    author_email='contato@hexgis.com',
    python_requires='>=3.9',
    classifiers=[
        'Development Status :: 2 - Pre-Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Natural Language :: English',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3.12',
    ],
    description="Distributionally robust logistic regression with "
                "Wasserstein risk bounds",
    entry_points={
        'console_scripts': [
            'drlr=drlr.cli:main',
        ],
    },
    install_requires=requirements,
    license="MIT license",
    long_description=readme + '\n\n' + history,
    include_package_data=True,
    keywords='drlr',
    name='drlr',
    packages=find_packages(include=['drlr', 'drlr.*']),
    setup_requires=setup_requirements,
    test_suite='tests',
    tests_require=test_requirements,
    url='https://github.com/hexgis/drlr',
    version='0.1.0',
    zip_safe=False,
)
