"""Diagonal main term and the Eisenstein envelope."""

from typing import List, Optional

from maasslab.core.budgets import BudgetBook
from maasslab.core.check_base import Check, CheckCategory, ProgressCallback, register_check
from maasslab.core.experiments import (
    diagonal_limit_report,
    diagonal_report,
    eisenstein_envelope,
    eisenstein_envelope_report,
)
from maasslab.models import Provenance, RunConfig, VerificationReport


class DiagonalCheck(Check):
    """(1/6 pi) int H(t) t dt against its arcsin closed form, and the limit 2 pi/3."""

    name = "diagonal.main"
    display_name = "Diagonal main term"
    group = "diagonal"
    category = CheckCategory.ORACLE

    def run(
        self,
        config: RunConfig,
        budgets: BudgetBook,
        progress_callback: Optional[ProgressCallback] = None,
    ) -> List[VerificationReport]:
        budget = budgets.budget(self.name, 0.02)
        Ts = self.select_T(config, 50, 2000, (500.0,))
        reports = []
        for i, T in enumerate(Ts):
            reports.append(diagonal_report(T, config.delta_c, budget))
            self.report_progress(100 * (i + 1) // len(Ts), f"T={T:g}", progress_callback)
        reports.append(diagonal_limit_report(budget=budgets.budget("diagonal.limit", 0.07)))
        return reports


class EisensteinEnvelopeCheck(Check):
    """The continuous-spectrum envelope against C ln T / T, and its decay between T and 2T."""

    name = "eisenstein.envelope"
    display_name = "Eisenstein envelope"
    group = "diagonal"
    category = CheckCategory.ENVELOPE

    TS = (100.0, 200.0)

    def run(
        self,
        config: RunConfig,
        budgets: BudgetBook,
        progress_callback: Optional[ProgressCallback] = None,
    ) -> List[VerificationReport]:
        C = budgets.constant("eisenstein_envelope", 10.0)
        reports = [eisenstein_envelope_report(T, config.alpha, C) for T in self.TS]
        lo, hi = (eisenstein_envelope(T, config.alpha) for T in self.TS)
        reports.append(
            VerificationReport.build(
                check_id="eisenstein.envelope_trend",
                module="experiments",
                inputs={"T_lo": self.TS[0], "T_hi": self.TS[1], "alpha": config.alpha},
                lhs=hi,
                rhs=lo,
                residual=hi / lo,
                budget=budgets.budget("eisenstein.envelope_trend", 0.7),
                provenance=Provenance.DERIVED,
                notes="ln T / T halves roughly when T doubles",
            )
        )
        return reports


register_check(DiagonalCheck())
register_check(EisensteinEnvelopeCheck())
