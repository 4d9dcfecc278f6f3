"""Off-diagonal reproductions: short-range negligibility and the j = 0, c = 1 term."""

from typing import List, Optional

from maasslab.core.budgets import BudgetBook
from maasslab.core.check_base import Check, CheckCategory, ProgressCallback, register_check
from maasslab.core.experiments import j0_c1_term, short_offdiag_negligibility
from maasslab.models import RunConfig, VerificationReport


class ShortOffdiagCheck(Check):
    """Bessel averages across the short off-diagonal cube stay negligible."""

    name = "offdiag.short"
    display_name = "Short off-diagonal"
    group = "offdiag"
    category = CheckCategory.ENVELOPE

    TS = (10.0, 20.0)
    # the cube is nonempty only for alpha < 1/7
    ALPHA = 0.1

    def run(
        self,
        config: RunConfig,
        budgets: BudgetBook,
        progress_callback: Optional[ProgressCallback] = None,
    ) -> List[VerificationReport]:
        reports = []
        for i, T in enumerate(self.TS):
            bits = config.precision_bits
            reports.append(
                short_offdiag_negligibility(T, self.ALPHA, precision_bits=bits, seed=config.seed)
            )
            self.report_progress(100 * (i + 1) // len(self.TS), f"T={T:g}", progress_callback)
        return reports


class J0TermCheck(Check):
    """The j = 0, c = 1 sum over sym^2 Delta against C M^(-1/2 + eps) times its trivial bound."""

    name = "offdiag.j0_c1"
    display_name = "j = 0, c = 1 term"
    group = "offdiag"
    category = CheckCategory.ENVELOPE

    def run(
        self,
        config: RunConfig,
        budgets: BudgetBook,
        progress_callback: Optional[ProgressCallback] = None,
    ) -> List[VerificationReport]:
        C = budgets.constant("j0", 1.0)
        return [j0_c1_term(None, N=1.0, T=40.0, alpha=config.alpha, constant=C)]


register_check(ShortOffdiagCheck())
register_check(J0TermCheck())
