# Copyright 2026 The rowclone_sim Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================

from setuptools import find_packages, setup

with open('README.md') as f:
    long_description = f.read()

setup(
    name='rowclone_sim',
    version='0.1.0',
    description=('Trace-driven DRAM simulator for in-DRAM bulk copy and '
                 'initialization'),
    long_description=long_description,
    long_description_content_type='text/markdown',
    packages=find_packages(exclude=['tests']),
    install_requires=['numpy', 'six', 'absl-py', 'pandas'],
    package_data={'rowclone_sim': ['configs/*.json']},
    include_package_data=True,
    zip_safe=False,
    entry_points={
        'console_scripts': ['rowclone-sim=rowclone_sim.cli:main'],
    },
    classifiers=[
        'License :: OSI Approved :: Apache Software License',
        'Programming Language :: Python :: 3.6',
        'Programming Language :: Python :: 3.7',
        'Intended Audience :: Developers',
        'Intended Audience :: Science/Research',
        'Topic :: System :: Hardware',
        'Topic :: Scientific/Engineering',
    ],
    license='Apache License, Version 2.0',
    maintainer='RowClone Simulator Developers',
    maintainer_email='',
)
