"""Gamma-function audits: reflection, Stirling envelope, K-Bessel Mellin identity."""

from typing import List, Optional

import numpy as np

from maasslab.core.budgets import BudgetBook
from maasslab.core.check_base import Check, CheckCategory, ProgressCallback, register_check
from maasslab.core.gamma import kbessel_mellin_identity, reflection_defect, stirling_relative_error
from maasslab.models import Provenance, RunConfig, VerificationReport

GROUP = "gamma-audit"
MODULE = "gamma"


class ReflectionCheck(Check):
    """|Gamma(1/2 + i g)|^2 cosh(pi g) / pi = 1 on the acceptance grid."""

    name = "gamma.reflection"
    display_name = "Gamma reflection on the half line"
    group = GROUP
    category = CheckCategory.ORACLE

    GAMMAS = (0.1, 1.0, 5.0, 10.0, 50.0, 100.0)

    def run(
        self,
        config: RunConfig,
        budgets: BudgetBook,
        progress_callback: Optional[ProgressCallback] = None,
    ) -> List[VerificationReport]:
        budget = budgets.budget(self.name, 1e-20)
        reports = []
        for g in self.GAMMAS:
            defect = reflection_defect(g, config.precision_bits)
            reports.append(
                VerificationReport.build(
                    check_id=self.name,
                    module=MODULE,
                    inputs={"gamma": g, "bits": config.precision_bits},
                    lhs=1 + defect,
                    rhs=1,
                    residual=defect,
                    budget=budget,
                    provenance=Provenance.PAPER,
                )
            )
        return reports


class StirlingCheck(Check):
    """Relative Stirling error against C/(1+|gamma|) on an 8 x 25 grid, and its halving rate."""

    name = "gamma.stirling"
    display_name = "Stirling envelope"
    group = GROUP
    category = CheckCategory.ENVELOPE

    SIGMAS = tuple(float(s) for s in np.linspace(0.25, 3.0, 8))
    GAMMAS = (
        0, 0.5, 1, 2, 3, 5, 7.5, 10, 15, 20, 25, 30, 40,
        50, 60, 80, 100, 120, 160, 200, 250, 320, 400, 500, 640,
    )

    def run(
        self,
        config: RunConfig,
        budgets: BudgetBook,
        progress_callback: Optional[ProgressCallback] = None,
    ) -> List[VerificationReport]:
        C = budgets.constant("stirling", 10.0)
        halving_budget = budgets.budget("gamma.stirling_halving", 0.1)
        reports = []
        for i, sigma in enumerate(self.SIGMAS):
            errors = {g: stirling_relative_error(sigma, g) for g in self.GAMMAS}
            ratios = [errors[g] * (1 + g) / C for g in self.GAMMAS]
            worst = int(np.argmax(ratios))
            reports.append(
                VerificationReport.build(
                    check_id=self.name,
                    module=MODULE,
                    inputs={"sigma": sigma, "C": C, "points": len(self.GAMMAS)},
                    lhs=errors[self.GAMMAS[worst]],
                    rhs=C / (1 + self.GAMMAS[worst]),
                    residual=ratios[worst],
                    budget=1,
                    provenance=Provenance.PAPER,
                    notes=f"worst gamma {self.GAMMAS[worst]}",
                )
            )
            halvings = [
                errors[2 * g] / errors[g] for g in self.GAMMAS if g >= 20 and 2 * g in errors
            ]
            reports.append(
                VerificationReport.build(
                    check_id="gamma.stirling_halving",
                    module=MODULE,
                    inputs={"sigma": sigma, "pairs": len(halvings)},
                    lhs=max(halvings, key=lambda r: abs(r - 0.5)),
                    rhs=0.5,
                    residual=max(abs(r - 0.5) for r in halvings),
                    budget=halving_budget,
                    provenance=Provenance.DERIVED,
                )
            )
            percent = 100 * (i + 1) // len(self.SIGMAS)
            self.report_progress(percent, f"sigma={sigma:.3f}", progress_callback)
        return reports


class KBesselMellinCheck(Check):
    """int y^s K_iT(y)^2 dy/y against its gamma closed form."""

    name = "gamma.kbessel_mellin"
    display_name = "K-Bessel Mellin identity"
    group = GROUP
    category = CheckCategory.IDENTITY

    POINTS = ((2, 1.0), (complex(0.5, 3), 5.0), (3, 10.0))

    def run(
        self,
        config: RunConfig,
        budgets: BudgetBook,
        progress_callback: Optional[ProgressCallback] = None,
    ) -> List[VerificationReport]:
        budget = budgets.budget(self.name, 1e-10)
        reports = []
        for s, T in self.POINTS:
            lhs, rhs = kbessel_mellin_identity(s, T, config.precision_bits)
            reports.append(
                VerificationReport.build(
                    check_id=self.name,
                    module=MODULE,
                    inputs={"s": s, "T": T, "bits": config.precision_bits},
                    lhs=lhs,
                    rhs=rhs,
                    residual=abs(lhs.value - rhs.value) / abs(rhs.value),
                    budget=budget,
                    provenance=Provenance.PAPER,
                )
            )
        return reports


register_check(ReflectionCheck())
register_check(StirlingCheck())
register_check(KBesselMellinCheck())
