"""The iterate command: closed-form iteration formulas for one case block."""

import argparse
import logging
from typing import Any

from pindex.commands.base import BaseCommand, parse_int_list, require
from pindex.commands.registry import register_command
from pindex.core.normal_form import case_representative
from pindex.index.cases import compare_case
from pindex.index.formulas import iterate_closed_form
from pindex.report import ReportDocument

logger = logging.getLogger(__name__)


@register_command
class IterateCommand(BaseCommand):
    """(i, nu) of the (2m - 1)-th iterate for a case block."""

    name = "iterate"
    description = "Evaluate the iteration formulas of a normal-form case"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--case", type=int, required=True, choices=range(1, 11), help="Case number 1-10")
        parser.add_argument("--theta", type=float, default=None, help="Angle for Cases 7-9")
        parser.add_argument("--i1", type=int, default=0, help="i_{P,1} of the one-period path")
        parser.add_argument("--m", type=parse_int_list, default=[1, 2, 3, 4], help="Iterates m")
        parser.add_argument("--numeric", action="store_true",
                            help="Also count crossings along a constructed path")

    def run(self, args: argparse.Namespace, config: dict[str, Any]) -> ReportDocument:
        report = self.new_report(args, config)
        require(all(m >= 1 for m in args.m), "--m values must be positive")
        _, tag = case_representative(args.case, args.theta)

        if not args.numeric:
            rows = []
            for m in args.m:
                pair = iterate_closed_form(tag, args.i1, m, config["tol_integer"])
                rows.append({"m": m, "i": pair.i, "nu": pair.nu})
            report.add_section("closed_form", rows)
            report.summary = f"Case {args.case}: {len(rows)} iterates"
            return report

        rows = []
        for m, closed, numeric in compare_case(args.case, args.theta, args.m):
            rows.append({"m": m, "closed_form": closed.as_tuple(), "crossing_count": numeric.as_tuple()})
            report.add_verdict(
                f"case{args.case}_m{m}", closed.as_tuple() == numeric.as_tuple(),
                "iterate_closed_form vs index_crossing",
                f"closed {closed.as_tuple()}, numeric {numeric.as_tuple()}",
            )
        report.add_section("comparison", rows)
        report.summary = f"Case {args.case}: {len(rows)} iterates compared"
        return report
