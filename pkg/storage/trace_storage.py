import csv
import logging
from pathlib import Path
from typing import List

from models.report import RunSummary
from sim.simulator import SimulationTrace

logger = logging.getLogger(__name__)


def _number(value: float) -> str:
    return format(float(value), ".17g")


def csv_header(trace: SimulationTrace) -> List[str]:
    """
    Column order: t; per robot i the position x<i>_<j>, the virtual coordinates
    w<i>_<l> and phi<i> = |Phi_i|; then the aggregates.
    """
    header = ["t"]
    for i in range(1, trace.n_robots + 1):
        header += [f"x{i}_{j}" for j in range(1, trace.n + 1)]
        header += [f"w{i}_{l}" for l in range(1, trace.m + 1)]
        header.append(f"phi{i}")
    header += ["alive_count", "min_distance", "max_neighbor_distance"]
    header += [f"mean_error_{l}" for l in range(1, trace.m + 1)]
    header += [f"target_{l}" for l in range(1, trace.m + 1)]
    header.append("V")
    return header


def save_trace_csv(trace: SimulationTrace, path: str) -> Path:
    """
    Write one row per recorded sample, floats in full precision.
    Identical traces give byte-identical files.
    """
    output = Path(path)
    output.parent.mkdir(parents=True, exist_ok=True)

    with open(output, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(csv_header(trace))
        for k in range(trace.n_samples):
            row = [_number(trace.times[k])]
            for i in range(trace.n_robots):
                row += [_number(v) for v in trace.positions[k, i]]
                row += [_number(v) for v in trace.omegas[k, i]]
                row.append(_number(trace.phi_norms[k, i]))
            row.append(str(int(trace.alive[k].sum())))
            row += [_number(trace.min_distance[k]), _number(trace.max_neighbor_distance[k])]
            row += [_number(v) for v in trace.mean_error[k]]
            row += [_number(v) for v in trace.target[k]]
            row.append(_number(trace.lyapunov[k]))
            writer.writerow(row)

    logger.info(f"Wrote {trace.n_samples} samples to {output}")
    return output


def save_summary_json(summary: RunSummary, path: str) -> Path:
    output = Path(path)
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text(summary.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info(f"Wrote run summary to {output}")
    return output
