"""GL(3) Voronoi audits: kernel bounds, Psi+- and the c = 1 identity on an Eisenstein lift."""

from typing import List, Optional

from maasslab.core.arith import eisenstein_sym2_coefficients
from maasslab.core.budgets import BudgetBook
from maasslab.core.check_base import Check, CheckCategory, ProgressCallback, register_check
from maasslab.core.voronoi import (
    afe_profile_check,
    contour_shift_report,
    kernel_bound_audit,
    kernel_weight_check,
    mellin_decay_audit,
    psi_bound_report,
    psi_decay_report,
    psi_u_scaling_report,
    stirling_form_audit,
    voronoi_identity_smoke,
    voronoi_truncation_audit,
)
from maasslab.models import Provenance, PsiPmSpec, RunConfig, VerificationReport

GROUP = "voronoi-audit"

# Eisenstein lift used for the c = 1 identity
LIFT_T = 9.5
LIFT_TABLE = 1000
LIFT_M = 20.0


def _psi_spec(sign: str, u: float = 0.0) -> PsiPmSpec:
    return PsiPmSpec(y=0.2, z=0.5, u=u, sign=sign, N=100.0, M=1e6, T=100.0)


class KernelCheck(Check):
    """Gamma-quotient kernels on Re s = eps: bound, Stirling form and Mellin decay."""

    name = "voronoi.kernels"
    display_name = "Voronoi kernel bounds"
    group = GROUP
    category = CheckCategory.ENVELOPE

    def run(
        self,
        config: RunConfig,
        budgets: BudgetBook,
        progress_callback: Optional[ProgressCallback] = None,
    ) -> List[VerificationReport]:
        C = budgets.constant("kernel_bound", 100.0)
        reports = []
        for T in self.select_T(config, 50, 200, (50.0, 100.0, 200.0)):
            reports.append(kernel_bound_audit(T, C))
            reports.append(stirling_form_audit(T))
        reports.append(mellin_decay_audit())
        window_defect = kernel_weight_check(100.0, 0.2, [0.05, 0.5, 1.0, 1.5, 1.9, 1.99])
        reports.append(
            VerificationReport.build(
                check_id="voronoi.vectorised_window",
                module="voronoi",
                inputs={"T": 100.0, "alpha": 0.2},
                lhs=window_defect,
                rhs=0,
                residual=window_defect,
                budget=1e-12,
                provenance=Provenance.TRIVIAL,
            )
        )
        profile_defect = afe_profile_check([0.1, 0.5, 1.0, 3.0, 20.0])
        reports.append(
            VerificationReport.build(
                check_id="voronoi.vectorised_afe",
                module="voronoi",
                inputs={"points": 5},
                lhs=profile_defect,
                rhs=0,
                residual=profile_defect,
                budget=1e-13,
                provenance=Provenance.TRIVIAL,
            )
        )
        return reports


class PsiCheck(Check):
    """Psi+- bounds, decay past the surviving u-range, u-scaling and contour independence."""

    name = "voronoi.psi"
    display_name = "Psi+- transforms"
    group = GROUP
    category = CheckCategory.ENVELOPE

    def run(
        self,
        config: RunConfig,
        budgets: BudgetBook,
        progress_callback: Optional[ProgressCallback] = None,
    ) -> List[VerificationReport]:
        reports = []
        for sign in ("+", "-"):
            reports.append(psi_bound_report(_psi_spec(sign)))
        reports.append(psi_decay_report(_psi_spec("+")))
        reports.append(psi_u_scaling_report(_psi_spec("+", u=0.2)))
        reports.append(contour_shift_report(_psi_spec("+")))
        return reports


class IdentityCheck(Check):
    """The c = 1 summation formula on sym^2 of an Eisenstein series, and its dual cutoff."""

    name = "voronoi.identity"
    display_name = "Voronoi identity at c = 1"
    group = GROUP
    category = CheckCategory.IDENTITY

    def run(
        self,
        config: RunConfig,
        budgets: BudgetBook,
        progress_callback: Optional[ProgressCallback] = None,
    ) -> List[VerificationReport]:
        table = eisenstein_sym2_coefficients(LIFT_T, LIFT_TABLE)
        smoke = voronoi_identity_smoke(
            table, LIFT_T, LIFT_M, tolerance=budgets.budget("voronoi.identity.c1", 1e-2)
        )
        self.report_progress(50, "identity", progress_callback)
        truncation = voronoi_truncation_audit(
            table, LIFT_T, LIFT_M, tolerance=budgets.budget("voronoi.truncation", 1e-6)
        )
        return [smoke, truncation]


register_check(KernelCheck())
register_check(PsiCheck())
register_check(IdentityCheck())
