import logging
import math
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import pandas as pd

from src.config.config import ExperimentConfig
from src.core.quadrature import NonConvergenceError
from src.core.reports import PropertyReport
from src.harness.base import CheckOutcome, PropertyContext, get_property
from src.harness.catalog import in_catalog_order, validate_names
from src.utils.parallel import thread_map
from src.utils.serialization import to_jsonable, write_json

logger = logging.getLogger(__name__)

VERDICTS = ("pass", "fail", "unstable", "error")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2
EXIT_FAILED = 3

# Ratios this small on both finest levels count as settled
STABILITY_FLOOR = 1e-9

CSV_COLUMNS = ["property", "N", "pass", "worst_ratio", "witness_id", "seconds"]


def relative_change(previous: float, current: float) -> float:
    if previous == current:
        return 0.0
    if not (math.isfinite(previous) and math.isfinite(current)):
        return math.inf
    return abs(current - previous) / max(abs(previous), abs(current))


def run_property(name: str, config: ExperimentConfig, levels: Optional[List[int]] = None) -> PropertyReport:
    """Runs one catalog property across the refinement levels and folds the outcomes into a verdict."""
    check = get_property(name)
    levels = list(levels or config.window.levels)
    if not check.refine:
        levels = levels[:1]

    logger.info("Running %s on N=%s", name, levels)
    outcomes: Dict[int, CheckOutcome] = {}
    seconds: Dict[int, float] = {}
    for N in levels:
        start = time.perf_counter()
        try:
            outcome = check.check(PropertyContext(config, N, levels))
        except NonConvergenceError as e:
            seconds[N] = time.perf_counter() - start
            logger.warning("%s did not converge at N=%d: %s", name, N, e)
            trend = {k: v.worst_ratio for k, v in outcomes.items()}
            return PropertyReport(
                name, "error", max(trend.values(), default=math.nan), {"N": N}, trend, {"error": str(e)}, seconds
            )
        seconds[N] = time.perf_counter() - start
        outcomes[N] = outcome
        logger.debug("%s at N=%d: worst ratio %.6g (%.2fs)", name, N, outcome.worst_ratio, seconds[N])
        if not outcome.holds:
            break

    trend = {N: outcome.worst_ratio for N, outcome in outcomes.items()}
    details: Dict[str, Any] = {
        "description": check.description,
        "levels": {N: outcome.details for N, outcome in outcomes.items()},
    }

    failed = [N for N, outcome in outcomes.items() if not outcome.holds]
    if failed:
        N = failed[0]
        verdict = "fail"
        witness = {**(outcomes[N].witness or {}), "N": N}
    else:
        N = max(trend, key=lambda k: trend[k])
        verdict = "pass"
        witness = {**outcomes[N].witness, "N": N} if outcomes[N].witness is not None else None
        if not check.exact and len(trend) >= 2:
            finest = sorted(trend)[-2:]
            previous, current = trend[finest[0]], trend[finest[1]]
            change = 0.0 if max(previous, current) <= STABILITY_FLOOR else relative_change(previous, current)
            tolerance = getattr(config.tolerances, check.stability_key)
            details["stability"] = {"change": change, "tolerance": tolerance, "levels": finest}
            if change > tolerance:
                verdict = "unstable"
                logger.warning("%s constant moved by %.3g between N=%d and N=%d", name, change, *finest)

    report = PropertyReport(name, verdict, max(trend.values()), witness, trend, details, seconds)
    logger.info("%s: %s (worst ratio %.6g)", name, verdict, report.worst_ratio)
    return report


def exit_code(reports: List[PropertyReport]) -> int:
    verdicts = {report.verdict for report in reports}
    if "fail" in verdicts:
        return EXIT_FAILED
    if verdicts & {"error", "unstable"}:
        return EXIT_NUMERICAL
    return EXIT_OK


def witness_id(witness: Optional[Dict[str, Any]]) -> str:
    """Short label of the witness: its field, b or family, else empty."""
    if not witness:
        return ""
    for key in ("field", "b", "family", "pairing"):
        if key in witness:
            value = witness[key]
            return value if isinstance(value, str) else str(to_jsonable(value))
    return ""


def report_json(report: PropertyReport) -> Dict[str, Any]:
    """Report without timings, so reruns are byte-identical."""
    data = report._asdict()
    data.pop("seconds")
    return to_jsonable(data)


def summary_frame(reports: List[PropertyReport]) -> pd.DataFrame:
    rows = []
    for report in reports:
        for N, ratio in sorted(report.trend.items()):
            rows.append(
                {
                    "property": report.name,
                    "N": N,
                    "pass": report.passed,
                    "worst_ratio": ratio,
                    "witness_id": witness_id(report.witness),
                    "seconds": report.seconds.get(N, math.nan),
                }
            )
    return pd.DataFrame(rows, columns=CSV_COLUMNS)


def run_experiment(config: ExperimentConfig, out_dir: Optional[Union[str, Path]] = None) -> List[PropertyReport]:
    """Runs every listed property (concurrently) and writes <name>.json and <name>.csv under out_dir."""
    validate_names(config.properties)
    names = in_catalog_order(config.properties)
    logger.info(
        "Experiment %s: %d properties, levels %s, seed %d",
        config.name,
        len(names),
        config.window.levels,
        config.seed,
    )

    reports = thread_map(lambda name: run_property(name, config), names)

    if out_dir is not None:
        out = Path(out_dir)
        write_json(
            out / f"{config.name}.json",
            {"config": config.to_dict(), "reports": [report_json(r) for r in reports]},
        )
        summary_frame(reports).to_csv(out / f"{config.name}.csv", index=False)
        logger.info("Reports written to %s", out)
    return reports
