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


"""
Simple Lie algebras in Chevalley bases, Coxeter gradings, commuting Lax flows and affine Toda
field checks.

WARNING: Saved settings are not concurrent-safe (multiple python processes might race on them.)
"""

import importlib.metadata as importlib_metadata
import logging

__version__ = importlib_metadata.version(__name__.replace(".", "-"))

LOG = logging.getLogger(__name__)

from ansys.tools.toda.chevalley import (  # noqa: E402
    ChevalleyAlgebra,
    adjoint_matrix,
    bracket,
    build_chevalley_basis,
    killing_form,
    verify_jacobi,
)
from ansys.tools.toda.config import (  # noqa: E402
    SETTINGS_DIR,
    clear_configuration,
    get_setting,
    get_settings,
    save_setting,
)
from ansys.tools.toda.coxeter import (  # noqa: E402
    CoxeterAutomorphism,
    LoopElement,
    coxeter,
    grading_defect,
    is_cyclic,
)
from ansys.tools.toda.errors import (  # noqa: E402
    BlowUpError,
    CertificationError,
    ConstructionError,
    DomainError,
    GridFormatError,
    TodaError,
)
from ansys.tools.toda.involution import (  # noqa: E402
    AntilinearConjugation,
    CartanInvolution,
    certify_coxeter_compatibility,
    compact_conjugation,
    enumerate_lifts,
    lift_involution,
    real_form_conjugation,
)
from ansys.tools.toda.laxflow import (  # noqa: E402
    FieldGrid,
    FlowSpec,
    integrate_flow,
    lax_field,
    mc_residual,
)
from ansys.tools.toda.report import ResidualReport  # noqa: E402
from ansys.tools.toda.rootsystem import RootSystem, build_root_system  # noqa: E402
from ansys.tools.toda.toda import (  # noqa: E402
    CyclicData,
    TodaField,
    formal_killing_recursion,
    reconstruct_omega,
    toda_residual,
    vacuum_cyclic_element,
)

__all__ = [
    "LOG",
    "SETTINGS_DIR",
    "AntilinearConjugation",
    "BlowUpError",
    "CartanInvolution",
    "CertificationError",
    "ChevalleyAlgebra",
    "ConstructionError",
    "CoxeterAutomorphism",
    "CyclicData",
    "DomainError",
    "FieldGrid",
    "FlowSpec",
    "GridFormatError",
    "LoopElement",
    "ResidualReport",
    "RootSystem",
    "TodaError",
    "TodaField",
    "adjoint_matrix",
    "bracket",
    "build_chevalley_basis",
    "build_root_system",
    "certify_coxeter_compatibility",
    "clear_configuration",
    "compact_conjugation",
    "coxeter",
    "enumerate_lifts",
    "formal_killing_recursion",
    "get_setting",
    "get_settings",
    "grading_defect",
    "integrate_flow",
    "is_cyclic",
    "killing_form",
    "lax_field",
    "lift_involution",
    "mc_residual",
    "real_form_conjugation",
    "reconstruct_omega",
    "save_setting",
    "toda_residual",
    "vacuum_cyclic_element",
    "verify_jacobi",
]
