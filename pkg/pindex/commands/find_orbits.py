"""The find-orbits command: closed characteristics of a surface by dual-action search."""

import argparse
import logging
from typing import Any

import numpy as np

from pindex.commands.base import BaseCommand
from pindex.commands.registry import register_command
from pindex.config import Tolerances
from pindex.geometry import EllipsoidSurface, load_surface, pinching_certificate, validate_P_symmetry
from pindex.report import ReportDocument
from pindex.variational.dual_action import OrbitRecord, find_critical_points

logger = logging.getLogger(__name__)


def add_surface_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--surface", required=True, help="Surface file with n, kappa, radii and alpha")
    parser.add_argument("--restarts", type=int, default=None, help="Number of search restarts")
    parser.add_argument("--modes", type=int, default=None, help="Fourier truncation N_max of the search")
    parser.add_argument("--seed", type=int, default=None, help="Seed of the restart generator")


def search_orbits(surface: EllipsoidSurface, config: dict[str, Any], report: ReportDocument) -> list[OrbitRecord]:
    """Validate the surface, run the orbit search and record both in the report."""
    gauge = surface.gauge()
    validate_P_symmetry(gauge, seed=config["seed"])
    certificate = pinching_certificate(surface)
    report.add_section("surface", surface.to_dict())
    report.add_section("pinching", certificate.to_dict())
    if len(set(surface.radii)) == 1:
        logger.warning("round sphere: every orbit lies in a degenerate family")

    orbits = find_critical_points(
        gauge,
        restarts=config["restarts"],
        seed=config["seed"],
        N_max=config["modes"],
        max_iterations=config["max_iterations"],
        grad_tol=config["grad_tol"],
        tol=Tolerances.from_config(config),
    )
    logger.info(f"found {len(orbits)} distinct orbits")
    return orbits


@register_command
class FindOrbitsCommand(BaseCommand):
    """Orbit search only; no index computations."""

    name = "find-orbits"
    description = "Find P-symmetric closed characteristics on a surface"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        add_surface_arguments(parser)

    def run(self, args: argparse.Namespace, config: dict[str, Any]) -> ReportDocument:
        report = self.new_report(args, config)
        surface = load_surface(args.surface)
        orbits = search_orbits(surface, config, report)
        r, R = min(surface.radii), max(surface.radii)
        for k, orbit in enumerate(orbits, 1):
            residual = orbit.residual()
            report.add_verdict(
                f"orbit_{k}_residual",
                residual <= 1e-6,
                "OrbitRecord.residual",
                f"|y' - J H_2'(y)| = {residual:.3e}",
            )
            report.add_verdict(
                f"orbit_{k}_action_window",
                (1 - 1e-4) * np.pi * r**2 <= orbit.action <= (1 + 1e-4) * np.pi * R**2,
                "find_critical_points",
                f"action {orbit.action:.10g}",
            )
        report.add_section("orbits", [orbit.to_dict() for orbit in orbits])
        report.summary = f"{len(orbits)} geometrically distinct orbits"
        return report
