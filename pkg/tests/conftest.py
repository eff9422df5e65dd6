# Copyright (C) 2025 ANSYS, Inc. and/or its affiliates.
# SPDX-License-Identifier: MIT
#
#
# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.


import sys

import numpy as np
import pytest

from ansys.tools.toda.chevalley import build_chevalley_basis
from ansys.tools.toda.coxeter import coxeter
from ansys.tools.toda.involution import compact_conjugation
from ansys.tools.toda.rootsystem import build_root_system

ALL = set("darwin linux win32".split())


def pytest_runtest_setup(item):
    supported_platforms = ALL.intersection(mark.name for mark in item.iter_markers())
    plat = sys.platform
    if supported_platforms and plat not in supported_platforms:
        pytest.skip("cannot run on platform {}".format(plat))


def _algebra(series, rank):
    return build_chevalley_basis(build_root_system(series, rank))


@pytest.fixture(scope="session")
def a1():
    return _algebra("A", 1)


@pytest.fixture(scope="session")
def a2():
    return _algebra("A", 2)


@pytest.fixture(scope="session")
def a3():
    return _algebra("A", 3)


@pytest.fixture(scope="session")
def b2():
    return _algebra("B", 2)


@pytest.fixture(scope="session")
def g2():
    return _algebra("G", 2)


@pytest.fixture(scope="session")
def d4():
    return _algebra("D", 4)


@pytest.fixture(scope="session")
def sigma_a2(a2):
    return coxeter(a2)


@pytest.fixture(scope="session")
def compact_a2(a2):
    return compact_conjugation(a2)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
