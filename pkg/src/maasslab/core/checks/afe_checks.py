"""AFE checks in the Eisenstein analogue, where both sides are computable."""

from typing import List, Optional

import numpy as np

from maasslab.core.budgets import BudgetBook
from maasslab.core.check_base import Check, CheckCategory, ProgressCallback, register_check
from maasslab.core.lfun import (
    afe_sym2_identity,
    afe_zeta_identity,
    kernel_envelope_check,
    stirling_kernel_expansion_check,
)
from maasslab.models import AfeKernelSpec, RunConfig, VerificationReport


class ZetaIdentityCheck(Check):
    """|zeta(1/2+it)|^2 against its two-sided AFE, including next to the first zero."""

    name = "afe.zeta"
    display_name = "AFE for |zeta|^2"
    group = "afe-check"
    category = CheckCategory.IDENTITY

    HEIGHTS = (2.0, 5.0, 10.0, 14.1347251417, 20.0, 50.0)
    BETA = 0.01

    def run(
        self,
        config: RunConfig,
        budgets: BudgetBook,
        progress_callback: Optional[ProgressCallback] = None,
    ) -> List[VerificationReport]:
        tolerance = budgets.budget(self.name, 1e-8)
        reports = []
        for i, t in enumerate(self.HEIGHTS):
            reports.append(afe_zeta_identity(t, self.BETA, tolerance))
            self.report_progress(100 * (i + 1) // len(self.HEIGHTS), f"t={t}", progress_callback)
        return reports


class Sym2IdentityCheck(Check):
    """Degree-six AFE for |L(1/2+it, sym^2 E_T)|^2."""

    name = "afe.sym2"
    display_name = "AFE for sym^2 of an Eisenstein series"
    group = "afe-check"
    category = CheckCategory.IDENTITY

    def run(
        self,
        config: RunConfig,
        budgets: BudgetBook,
        progress_callback: Optional[ProgressCallback] = None,
    ) -> List[VerificationReport]:
        return [afe_sym2_identity(3.0, 2.0, budgets.budget(self.name, 1e-3))]


class KernelExpansionCheck(Check):
    """V kernels against their leading Stirling term, and their x-decay envelope."""

    name = "afe.kernel_expansion"
    display_name = "AFE kernel expansion"
    group = "afe-check"
    category = CheckCategory.ENVELOPE

    def run(
        self,
        config: RunConfig,
        budgets: BudgetBook,
        progress_callback: Optional[ProgressCallback] = None,
    ) -> List[VerificationReport]:
        C = budgets.constant("envelope", 100.0)
        v1 = AfeKernelSpec(kind="V1plus", t=100.0, T=100.0)
        v2 = AfeKernelSpec(kind="V2", t=100.0, T=100.0)
        envelope = AfeKernelSpec(kind="V1", t=20.0, T=20.0)
        return [
            stirling_kernel_expansion_check(v1, 1.0, config.alpha, C),
            stirling_kernel_expansion_check(v2, 1e3, config.alpha, C),
            kernel_envelope_check(envelope, 5.0, np.geomspace(5.0, 5000.0, 40)),
        ]


register_check(ZetaIdentityCheck())
register_check(Sym2IdentityCheck())
register_check(KernelExpansionCheck())
