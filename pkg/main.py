import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, List, Optional, TypedDict

from dotenv import load_dotenv
from langgraph.graph import END, START, StateGraph

from gvf.verification import coupling_report, verify_decoupling
from models.report import RunSummary
from scenarios.loader import list_bundled, load_scenario
from sim.conditions import check_conditions, lyapunov_increases
from sim.simulator import run
from storage.trace_storage import save_summary_json, save_trace_csv
from utils.config import get_output_dir, get_verification_config
from utils.constants import VERIFICATION_CONFIG_PATH
from utils.errors import (
    BarrierViolationError,
    ConfigurationError,
    DecouplingMismatchError,
    ManifoldNotFoundError,
    NumericFailureError,
    ScenarioError,
)

# Load environment variables
load_dotenv()

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(levelname)s - %(module)s:%(funcName)s:%(lineno)d - %(message)s"
)

EXIT_OK = 0
EXIT_CONDITIONS_UNMET = 1
EXIT_SCENARIO_ERROR = 2
EXIT_BARRIER_VIOLATION = 3
EXIT_NUMERIC_FAILURE = 4
EXIT_DECOUPLING_MISMATCH = 5


# Define the state for the simulate workflow
class SimulateState(TypedDict):
    scenario: str
    overrides: List[str]
    csv_path: Optional[str]
    json_path: Optional[str]
    output_dir: Optional[str]
    loaded: Any
    trace: Any
    report: Any
    error: str | None
    exit_code: int


def _exit_code_for(error: Exception) -> int:
    if isinstance(error, BarrierViolationError):
        return EXIT_BARRIER_VIOLATION
    if isinstance(error, NumericFailureError):
        return EXIT_NUMERIC_FAILURE
    return EXIT_SCENARIO_ERROR


def load_scenario_node(state: SimulateState) -> SimulateState:
    """Parse, validate and build the scenario configuration."""
    logging.info(f"Loading scenario {state['scenario']}...")
    try:
        loaded = load_scenario(state["scenario"], state["overrides"])
        return {**state, "loaded": loaded}
    except (ScenarioError, ConfigurationError, ManifoldNotFoundError, ValueError, FileNotFoundError) as e:
        logging.error(f"Failed to load scenario: {e}")
        return {**state, "error": f"Failed to load scenario: {e}", "exit_code": EXIT_SCENARIO_ERROR}


def simulate_node(state: SimulateState) -> SimulateState:
    """Integrate the swarm over the scenario horizon."""
    try:
        trace = run(state["loaded"].config)
        return {**state, "trace": trace}
    except (BarrierViolationError, NumericFailureError, ConfigurationError) as e:
        logging.error(f"Simulation aborted: {e}")
        return {**state, "error": f"Simulation aborted: {e}", "exit_code": _exit_code_for(e)}


def check_conditions_node(state: SimulateState) -> SimulateState:
    """Evaluate the requested success conditions at the end of the trace."""
    checks = state["loaded"].scenario.checks
    report = check_conditions(state["trace"], checks.tolerances, checks.conditions)
    exit_code = EXIT_OK if report.passed else EXIT_CONDITIONS_UNMET
    return {**state, "report": report, "exit_code": exit_code}


def write_artifacts_node(state: SimulateState) -> SimulateState:
    """Write the CSV trace and the JSON summary."""
    try:
        loaded, trace, report = state["loaded"], state["trace"], state["report"]
        outputs = loaded.scenario.outputs
        output_dir = Path(state["output_dir"] or get_output_dir())
        csv_path = state["csv_path"] or outputs.csv or str(output_dir / f"{loaded.config.name}.csv")
        json_path = state["json_path"] or outputs.json_path or str(output_dir / f"{loaded.config.name}.json")

        save_trace_csv(trace, csv_path)
        summary = RunSummary(
            scenario=loaded.config.name,
            manifold=trace.manifold,
            n_robots=trace.n_robots,
            alive=trace.final_alive,
            t_end=float(trace.times[-1]),
            samples=trace.n_samples,
            min_separation=trace.min_separation,
            min_separation_pair=trace.min_separation_pair,
            min_separation_time=trace.min_separation_time,
            final_lyapunov=float(trace.lyapunov[-1]),
            lyapunov_descent=not lyapunov_increases(trace),
            conditions=report,
            csv_path=csv_path,
        )
        save_summary_json(summary, json_path)
        return state
    except OSError as e:
        logging.error(f"Failed to write artifacts: {e}")
        return {**state, "error": f"Failed to write artifacts: {e}", "exit_code": EXIT_SCENARIO_ERROR}


def error_router(state: SimulateState) -> str:
    """Stop the pipeline as soon as a node reported an error."""
    return "END" if state.get("error") else "continue"


def _create_simulate_workflow() -> StateGraph:
    """Create the LangGraph workflow for the simulate command."""
    workflow = StateGraph(SimulateState)

    # Add nodes
    workflow.add_node("load_scenario", load_scenario_node)
    workflow.add_node("simulate", simulate_node)
    workflow.add_node("check_conditions", check_conditions_node)
    workflow.add_node("write_artifacts", write_artifacts_node)

    # Add edges
    workflow.add_edge(START, "load_scenario")
    workflow.add_conditional_edges("load_scenario", error_router, {"continue": "simulate", "END": END})
    workflow.add_conditional_edges("simulate", error_router, {"continue": "check_conditions", "END": END})
    workflow.add_edge("check_conditions", "write_artifacts")
    workflow.add_edge("write_artifacts", END)

    return workflow.compile()


def cmd_simulate(args: argparse.Namespace) -> int:
    workflow = _create_simulate_workflow()

    # Initialize state
    initial_state = SimulateState(
        scenario=args.scenario,
        overrides=list(args.overrides or []),
        csv_path=args.csv,
        json_path=args.json,
        output_dir=args.output_dir,
        loaded=None,
        trace=None,
        report=None,
        error=None,
        exit_code=EXIT_OK,
    )

    result = workflow.invoke(initial_state)

    if result.get("error"):
        print(result["error"], file=sys.stderr)
    if result.get("report") is not None:
        print(result["report"].format())
    return result["exit_code"]


def cmd_verify_lemma1(args: argparse.Namespace) -> int:
    settings = get_verification_config(VERIFICATION_CONFIG_PATH)["decoupling"]
    try:
        report = verify_decoupling(
            n_max=args.n_max if args.n_max is not None else settings["n_max"],
            m_max=args.m_max if args.m_max is not None else settings["m_max"],
            trials=args.trials if args.trials is not None else settings["trials"],
            seed=args.seed if args.seed is not None else settings["seed"],
            partial_range=settings["partial_range"],
            tolerance=settings["tolerance"],
            max_dimension=settings["max_dimension"],
        )
    except ConfigurationError as e:
        print(f"Invalid verification settings: {e}", file=sys.stderr)
        return EXIT_SCENARIO_ERROR
    except DecouplingMismatchError as e:
        print(f"{e}\n{json.dumps(e.instance, indent=2)}", file=sys.stderr)
        return EXIT_DECOUPLING_MISMATCH

    print(report.format())
    return EXIT_OK


def cmd_coupling_demo(args: argparse.Namespace) -> int:
    settings = get_verification_config(VERIFICATION_CONFIG_PATH)["coupling_demo"]
    report = coupling_report(
        draws=args.draws if args.draws is not None else settings["draws"],
        seed=args.seed if args.seed is not None else settings["seed"],
        partial_range=settings["partial_range"],
    )
    print(report.format())
    return EXIT_OK


def cmd_list_scenarios(args: argparse.Namespace) -> int:
    for name, description in list_bundled():
        print(f"{name:<18} {description}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="manifold-nav",
        description="Ordering-flexible multi-robot navigation on manifolds with coordinated guiding vector fields",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="Run a scenario file or bundled scenario")
    simulate.add_argument("scenario", help="Path to a scenario JSON file or the name of a bundled scenario")
    simulate.add_argument(
        "--set",
        "--override",
        dest="overrides",
        action="append",
        metavar="KEY=VALUE",
        help="Override a scenario value, e.g. integrator.dt=5e-4 or t_end=0.01 (repeatable)",
    )
    simulate.add_argument("--csv", help="Trace CSV path")
    simulate.add_argument("--json", help="Summary JSON path")
    simulate.add_argument("--output-dir", help="Directory for default artifact paths")
    simulate.set_defaults(handler=cmd_simulate)

    verify = commands.add_parser("verify-lemma1", help="Check the closed-form propagation term against brute force")
    verify.add_argument("--n-max", type=int)
    verify.add_argument("--m-max", type=int)
    verify.add_argument("--trials", type=int)
    verify.add_argument("--seed", type=int)
    verify.set_defaults(handler=cmd_verify_lemma1)

    demo = commands.add_parser("coupling-demo", help="Show infeasible versus feasible auxiliary vectors")
    demo.add_argument("--draws", type=int)
    demo.add_argument("--seed", type=int)
    demo.set_defaults(handler=cmd_coupling_demo)

    listing = commands.add_parser("list-scenarios", help="List the bundled scenarios")
    listing.set_defaults(handler=cmd_list_scenarios)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
