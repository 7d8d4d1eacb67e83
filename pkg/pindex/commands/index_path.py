"""The index-path command: P-indices of a stored or constant-coefficient path."""

import argparse
import json
import logging
from pathlib import Path
from typing import Any

import numpy as np

from pindex.commands.base import BaseCommand, parse_int_list, parse_omega_list, require
from pindex.commands.registry import register_command
from pindex.config import Tolerances, parse_schedule
from pindex.core.symplectic import Dim, standard_P
from pindex.errors import ConfigError
from pindex.index.crossing import bott_sum, index_crossing
from pindex.index.formulas import ellipsoid_index
from pindex.paths.engine import constant_path, extend_by_symmetry
from pindex.paths.path import SymplecticPath
from pindex.report import ReportDocument

logger = logging.getLogger(__name__)


def load_path(path: str | Path) -> SymplecticPath:
    """Read a path stored in the JSON sample format.

    Raises:
        ConfigError: If the file is missing or not valid JSON
    """
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read path file {path}: {e}") from e
    return SymplecticPath.from_dict(data)


@register_command
class IndexPathCommand(BaseCommand):
    """(i, nu) at a list of unit-circle points, with Bott identities for iterates."""

    name = "index-path"
    description = "Compute P-indices of a path by crossing count"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument("--path", help="Stored path file")
        source.add_argument("--coefficient", type=float, help="Constant coefficient c of A = c I")
        parser.add_argument("--n", type=int, default=None, help="Half dimension for --coefficient")
        parser.add_argument("--kappa", type=int, default=0, help="Number of P = +1 planes")
        parser.add_argument("--s", type=float, default=None, help="Path length for --coefficient")
        parser.add_argument("--omega", type=parse_omega_list, default=[1.0],
                            help="Unit-circle points: complex literals or angle:<radians>")
        parser.add_argument("--m", type=parse_int_list, default=None,
                            help="Iterates for the Bott identity table")

    def run(self, args: argparse.Namespace, config: dict[str, Any]) -> ReportDocument:
        report = self.new_report(args, config)
        tol = Tolerances.from_config(config)
        perturbation = parse_schedule(config["perturbation_schedule"])

        if args.path:
            gamma = load_path(args.path)
            dim = Dim(gamma.n, args.kappa)
        else:
            require(args.n is not None and args.s is not None, "--coefficient needs --n and --s")
            require(args.coefficient > 0 and args.s > 0, "--coefficient and --s must be positive")
            dim = Dim(args.n, args.kappa)
            gamma = constant_path(args.coefficient * np.eye(dim.size), args.s)
        P = standard_P(dim)

        rows = []
        for omega in args.omega:
            pair = index_crossing(gamma, omega, P, tol=tol, perturbation_schedule=perturbation)
            rows.append(pair.to_dict())
            logger.info(f"omega={omega:.6g}: (i, nu) = {pair.as_tuple()}")
            if args.coefficient is not None and abs(omega - 1.0) < 1e-12:
                expected = ellipsoid_index(dim, args.coefficient, args.s)
                report.add_verdict(
                    "ellipsoid_identity", pair.i - dim.kappa == expected, "index_crossing vs ellipsoid_index",
                    f"i - kappa = {pair.i - dim.kappa}, closed form {expected}",
                )
        report.add_section("indices", rows)

        if args.m:
            table = []
            for m in args.m:
                direct = index_crossing(extend_by_symmetry(gamma, P, m, tol), 1.0, P, tol=tol,
                                        perturbation_schedule=perturbation)
                summed = bott_sum(gamma, P, m, tol=tol, perturbation_schedule=perturbation)
                table.append({"m": m, "direct": direct.as_tuple(), "bott_sum": summed.as_tuple()})
                report.add_verdict(
                    f"bott_m{m}", direct.as_tuple() == summed.as_tuple(), "bott_sum vs index_crossing",
                    f"direct {direct.as_tuple()}, sum {summed.as_tuple()}",
                )
            report.add_section("bott", table)

        report.summary = f"indices at {len(args.omega)} points"
        return report
