"""The ellipsoid-analyze command: the full stability pipeline on one surface.

Pinching certificate, orbit search, index and nullity of every orbit and its
third iterate, Floquet data, the iteration bounds on the normal form of the
monodromy, the form/crossing cross-check and the two-orbit stability chain.
"""

import argparse
import logging
from typing import Any

import numpy as np

from pindex.commands.base import BaseCommand
from pindex.commands.find_orbits import add_surface_arguments, search_orbits
from pindex.commands.registry import register_command
from pindex.config import Tolerances, parse_schedule
from pindex.core.normal_form import decompose
from pindex.errors import (
    CrossOracleError,
    DecompositionUnsupportedError,
    DimensionError,
    TheoremViolationError,
)
from pindex.geometry import load_surface, pinching_certificate
from pindex.index.formulas import pinching_bounds, stability_chain, theorem37_check
from pindex.report import ReportDocument
from pindex.variational.dual_action import OrbitRecord
from pindex.variational.hessian import analyze_orbit, index_interval_check, theorem32_crosscheck

logger = logging.getLogger(__name__)


def _orbit_checks(
    report: ReportDocument,
    k: int,
    orbit: OrbitRecord,
    r: float,
    R: float,
    schedule: list[int],
    tol: Tolerances,
) -> dict[str, Any]:
    dim = orbit.gauge.dim
    extra: dict[str, Any] = {}

    for m in (1, 2):
        try:
            record = theorem32_crosscheck(orbit, m=m, N_schedule=schedule, tol=tol)
            report.add_verdict(f"orbit_{k}_crosscheck_m{m}", True, "theorem32_crosscheck", f"(i, nu) = {record.form}")
        except CrossOracleError as e:
            report.add_verdict(f"orbit_{k}_crosscheck_m{m}", False, "theorem32_crosscheck", str(e))
            extra[f"crosscheck_m{m}"] = e.bundle

        bounds = pinching_bounds(orbit.tau2, m, r, R, dim)
        i_m, nu_m = (orbit.index, orbit.nullity) if m == 1 else (orbit.index3, orbit.nullity3)
        if bounds.lower is not None:
            report.add_verdict(
                f"orbit_{k}_lower_m{m}", i_m >= bounds.lower, "pinching_bounds",
                f"i = {i_m} >= {bounds.lower}",
            )
        report.add_verdict(
            f"orbit_{k}_upper_m{m}", i_m + nu_m <= bounds.upper, "pinching_bounds",
            f"i + nu = {i_m + nu_m} <= {bounds.upper}",
        )

    try:
        decomposition = decompose(orbit.half_monodromy, orbit.gauge.P, tol)
        theorem = theorem37_check(decomposition, orbit.index, orbit.nullity, orbit.index3, orbit.nullity3, dim)
        report.add_verdict(
            f"orbit_{k}_iteration_bounds", True, "theorem37_check",
            f"diff3 = {theorem.diff3}, diffnu3 = {theorem.diffnu3}",
        )
        extra["iteration_bounds"] = theorem.to_dict()
        extra["normal_form"] = decomposition.to_dict()
    except TheoremViolationError as e:
        report.add_verdict(f"orbit_{k}_iteration_bounds", False, "theorem37_check", str(e))
    except DecompositionUnsupportedError as e:
        logger.warning(f"orbit {k}: normal form not available ({e}); iteration bounds skipped")
        extra["normal_form"] = None
    return extra


@register_command
class EllipsoidAnalyzeCommand(BaseCommand):
    """Two-orbit stability analysis of an ellipsoid."""

    name = "ellipsoid-analyze"
    description = "Find orbits on an ellipsoid and verify their index and stability data"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        add_surface_arguments(parser)

    def run(self, args: argparse.Namespace, config: dict[str, Any]) -> ReportDocument:
        report = self.new_report(args, config)
        tol = Tolerances.from_config(config)
        schedule = parse_schedule(config["mode_schedule"], kind=int)
        surface = load_surface(args.surface)
        dim = surface.dim
        certificate = pinching_certificate(surface)
        hypothesis = certificate.passes_53
        try:
            dim.require_theorem_range()
        except DimensionError as e:
            logger.warning(f"{e}; the stability verdict does not apply")
            hypothesis = False

        orbits = search_orbits(surface, config, report)
        r, R = certificate.r, certificate.R
        entries = []
        for k, orbit in enumerate(orbits, 1):
            analyze_orbit(orbit, N_schedule=schedule, tol=tol)
            entry = orbit.to_dict()
            entry.update(_orbit_checks(report, k, orbit, r, R, schedule, tol))
            entries.append(entry)
            window = (1 - 1e-4) * np.pi * r**2, (1 + 1e-4) * np.pi * R**2
            report.add_verdict(
                f"orbit_{k}_action_window", window[0] <= orbit.action <= window[1],
                "find_critical_points", f"action {orbit.action:.10g}",
            )
        report.add_section("orbits", entries)

        if certificate.passes_sqrt2:
            for rank, ok in index_interval_check(orbits, dim).items():
                report.add_verdict(f"index_interval_rank_{rank}", ok, "index_interval_check")

        chain = stability_chain(dim, [orbit.indices() for orbit in orbits], r, R)
        report.add_section("stability_chain", chain.to_dict())

        needed = 2 * dim.n - 4 * dim.kappa
        if not hypothesis:
            report.summary = (
                f"hypothesis not satisfied (R/r = {certificate.ratio:.6f}); "
                f"{len(orbits)} orbits analyzed"
            )
            return report
        for name, ok in chain.checks.items():
            report.add_verdict(f"chain_{name}", ok, "stability_chain")
        stable = [orbit for orbit in orbits if orbit.height is not None and orbit.height >= needed]
        holds = len(orbits) >= 2 and len(stable) >= 2
        report.add_verdict(
            "two_stable_orbits", holds, "ellipsoid-analyze",
            f"{len(orbits)} orbits, heights {[orbit.height for orbit in orbits]}, need e >= {needed}",
        )
        report.summary = (
            f"{len(orbits)} orbits, each with e >= {needed}" if holds
            else f"fewer than two orbits with e >= {needed}"
        )
        return report
