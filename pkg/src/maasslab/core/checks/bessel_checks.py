"""Bessel-average lemmas and the transform bounds used by the Kuznetsov expansion."""

import math
from typing import List, Optional

from config.settings import settings
from maasslab.core.bessel import (
    jbes_negligibility,
    jbes_report,
    kbes_report,
    transform_bound_report,
    transform_convergence_audit,
    transform_decay_report,
    write_bessel_csv,
)
from maasslab.core.budgets import BudgetBook
from maasslab.core.check_base import Check, CheckCategory, ProgressCallback, register_check
from maasslab.models import BumpSpec, Provenance, RunConfig, TransformSpec, VerificationReport

GROUP = "bessel-lemmas"


class JBesselCheck(Check):
    """J-Bessel average at x = T^2 and its negligibility below T^(2-3 alpha)."""

    name = "bessel.jbes"
    display_name = "J-Bessel average"
    group = GROUP
    category = CheckCategory.ENVELOPE

    NEGLIGIBLE = ((10.0, 5.0), (20.0, 10.0))

    def run(
        self,
        config: RunConfig,
        budgets: BudgetBook,
        progress_callback: Optional[ProgressCallback] = None,
    ) -> List[VerificationReport]:
        C = budgets.constant("bessel", 100.0)
        bits = config.precision_bits
        spec = TransformSpec(T=10.0, alpha=0.2, precision_bits=bits, node_budget=8)
        reports = [jbes_report(spec, spec.T**2, C)]
        for T, x in self.NEGLIGIBLE:
            spec = TransformSpec(T=T, alpha=0.2, precision_bits=bits, node_budget=8)
            reports.append(jbes_negligibility(spec, x, constant=C))
        if config.format == "csv":
            write_bessel_csv(reports, config.output_dir / "bessel_jbes.csv")
        return reports


class KBesselCheck(Check):
    """K-Bessel average across the support, its trend in T and its panel convergence."""

    name = "bessel.kbes"
    display_name = "K-Bessel average"
    group = GROUP
    category = CheckCategory.ENVELOPE

    TS = (10.0, 20.0, 40.0)
    # x = (T/pi) T^(alpha u) spans the support of h
    SHIFTS = (-0.8, -0.4, 0.0, 0.4, 0.8)
    TREND_SLACK = 1.1

    def run(
        self,
        config: RunConfig,
        budgets: BudgetBook,
        progress_callback: Optional[ProgressCallback] = None,
    ) -> List[VerificationReport]:
        C = budgets.constant("bessel", 100.0)
        bits = max(config.precision_bits, settings.bessel_precision_bits)
        reports = []
        ratios = {}
        for i, T in enumerate(self.TS):
            spec = TransformSpec(T=T, alpha=0.2, precision_bits=bits)
            worst = 0.0
            for u in self.SHIFTS:
                report = kbes_report(spec, T / math.pi * T ** (spec.alpha * u), C)
                worst = max(worst, float(report.residual) / float(report.budget))
                reports.append(report)
            ratios[T] = worst
            self.report_progress(100 * (i + 1) // len(self.TS), f"T={T:g}", progress_callback)
        steps = [ratios[b] / ratios[a] for a, b in zip(self.TS, self.TS[1:]) if ratios[a] > 0]
        reports.append(
            VerificationReport.build(
                check_id="bessel.kbes_trend",
                module="bessel",
                inputs={"Ts": ",".join(f"{T:g}" for T in self.TS), "shifts": len(self.SHIFTS)},
                lhs=max(steps, default=0.0),
                rhs=1,
                residual=max(steps, default=0.0),
                budget=self.TREND_SLACK,
                provenance=Provenance.DERIVED,
                notes="worst residual/budget per T: "
                + ", ".join(f"{T:g}: {r:.3e}" for T, r in ratios.items()),
            )
        )
        spec = TransformSpec(T=20.0, alpha=0.2, precision_bits=bits, node_budget=12)
        reports.append(transform_convergence_audit(spec, spec.T / math.pi, "kbes"))
        if config.format == "csv":
            write_bessel_csv(reports, config.output_dir / "bessel_kbes.csv")
        return reports


class TransformCheck(Check):
    """Dot, hat and check transforms of a log-bump: uniform bounds and decay."""

    name = "bessel.transforms"
    display_name = "Bump transforms"
    group = GROUP
    category = CheckCategory.ENVELOPE

    def run(
        self,
        config: RunConfig,
        budgets: BudgetBook,
        progress_callback: Optional[ProgressCallback] = None,
    ) -> List[VerificationReport]:
        C = budgets.constant("bessel", 100.0)
        b = BumpSpec(X=1.0)
        return [
            transform_bound_report(b, "dot", [2, 4], C),
            transform_bound_report(b, "hat", [0.5, 1.0, 2.0], C),
            transform_bound_report(b, "check", [0.5, 1.0, 2.0], C),
            transform_bound_report(BumpSpec(X=100.0), "hat", [7j / 128], C),
            transform_decay_report(BumpSpec(X=1.0, width=1.0), 30.0, C),
        ]


register_check(JBesselCheck())
register_check(KBesselCheck())
register_check(TransformCheck())
