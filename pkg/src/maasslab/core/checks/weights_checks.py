"""Watson-weight audits: H(t) asymptotics, derivative budgets, decay past 2T."""

from typing import List, Optional

import numpy as np

from maasslab.core.budgets import BudgetBook
from maasslab.core.check_base import Check, CheckCategory, ProgressCallback, register_check
from maasslab.core.weights import (
    decay_audit,
    derivative_audit,
    profile_derivative_audit,
    stirling_H_envelope,
    weight_sweep,
    write_weight_csv,
)
from maasslab.models import Provenance, RunConfig, VerificationReport, WeightParams

GROUP = "weights-audit"
MODULE = "weights"


class AsymptoticsCheck(Check):
    """Relative error of the Stirling main term of H against its envelope on the W-range."""

    name = "weights.asymptotics"
    display_name = "H(t) Stirling asymptotics"
    group = GROUP
    category = CheckCategory.ENVELOPE

    POINTS = 500

    def run(
        self,
        config: RunConfig,
        budgets: BudgetBook,
        progress_callback: Optional[ProgressCallback] = None,
    ) -> List[VerificationReport]:
        C = budgets.constant("stirling", 10.0)
        reports = []
        for T in self.select_T(config, 100, 500, (200.0,)):
            p = WeightParams.scaled(T=T, alpha=config.alpha)
            lo, hi = p.wrange
            samples = weight_sweep(np.linspace(lo, hi, self.POINTS), p)
            if config.format == "csv":
                write_weight_csv(samples, config.output_dir / f"weights_T{T:g}.csv")
            usable = [s for s in samples if s.rel_err is not None]
            ratios = [s.rel_err / stirling_H_envelope(s.t, T, C) for s in usable]
            worst = int(np.argmax(ratios))
            reports.append(
                VerificationReport.build(
                    check_id=self.name,
                    module=MODULE,
                    inputs={"T": T, "alpha": config.alpha, "points": self.POINTS, "C": C},
                    lhs=usable[worst].rel_err,
                    rhs=stirling_H_envelope(usable[worst].t, T, C),
                    residual=ratios[worst],
                    budget=1,
                    provenance=Provenance.PAPER,
                    notes=f"worst t = {usable[worst].t:.4f}; {len(samples) - len(usable)} dropped",
                )
            )
        return reports


class DerivativeCheck(Check):
    """Finite-difference derivatives of H and of the profile H0 against their budgets."""

    name = "weights.derivatives"
    display_name = "H(t) derivative budgets"
    group = GROUP
    category = CheckCategory.ENVELOPE

    def run(
        self,
        config: RunConfig,
        budgets: BudgetBook,
        progress_callback: Optional[ProgressCallback] = None,
    ) -> List[VerificationReport]:
        C = budgets.constant("weights_derivative", 100.0)
        reports = []
        for T in self.select_T(config, 100, 500, (200.0,)):
            p = WeightParams.scaled(T=T, alpha=config.alpha)
            audits = [derivative_audit(p, order, C, points=20) for order in (1, 2)]
            audits.append(profile_derivative_audit(T, config.alpha, C, points=20))
            for audit in audits:
                reports.append(
                    VerificationReport.build(
                        check_id=f"{self.name}.{audit.target}.{audit.order}",
                        module=MODULE,
                        inputs={"T": T, "alpha": config.alpha, "order": audit.order, "C": C},
                        lhs=audit.max_ratio,
                        rhs=1,
                        residual=audit.max_ratio,
                        budget=1,
                        provenance=Provenance.PAPER,
                        regime_ok=audit.regime_ok,
                        notes=f"worst at {audit.worst_t:.4f}",
                    )
                )
        return reports


class DecayCheck(Check):
    """H(t) e^(pi q) / H(2T) stays within [1/C, C] beyond the transition."""

    name = "weights.decay"
    display_name = "H(t) decay past 2T"
    group = GROUP
    category = CheckCategory.ENVELOPE

    def run(
        self,
        config: RunConfig,
        budgets: BudgetBook,
        progress_callback: Optional[ProgressCallback] = None,
    ) -> List[VerificationReport]:
        C = budgets.constant("weights_decay", 100.0)
        reports = []
        for T in self.select_T(config, 50, 500, (50.0,)):
            audit = decay_audit(T, C)
            reports.append(
                VerificationReport.build(
                    check_id=self.name,
                    module=MODULE,
                    inputs={"T": T, "C": C},
                    lhs=audit.max_ratio,
                    rhs=audit.min_ratio,
                    residual=max(audit.max_ratio, 1 / audit.min_ratio),
                    budget=C,
                    provenance=Provenance.PAPER,
                )
            )
        return reports


register_check(AsymptoticsCheck())
register_check(DerivativeCheck())
register_check(DecayCheck())
