"""
Main entry point for graph Markov chain analysis.

Builds DTMCs/CTMCs from edge-list graphs and reports equilibria, transient
distributions, entropy and divergence traces, channel measures and
entropic classifications.
"""

import argparse
import logging
import math
import sys
from typing import List, Literal, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, field_validator, model_validator

from analysis import ctmc_equilibrium, ctmc_transient, dtmc_equilibrium, dtmc_transient, simulate_walk
from chains import ctmc_from_graph, dtmc_from_graph
from entropic import classify, min_entropy_oracle
from errors import ValidationError
from graph import Graph, degree_pmf, format_edge_list, generate, load_edge_list, point_pmf, uniform_pmf
from information import channel_measures, entropy_trace, kl_trace
from utils import distribution_frame, emit, frame_to_csv, frame_to_json, read_channel_matrix, read_pmf, to_json

logger = logging.getLogger("main")

HORIZON_COMMANDS = ("transient", "entropy-trace", "kl-trace", "simulate")
GRAPH_COMMANDS = ("build", "steady", "classify") + HORIZON_COMMANDS

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


class RunConfig(BaseModel):
    command: Literal[
        "generate", "build", "steady", "transient", "entropy-trace",
        "kl-trace", "measures", "classify", "simulate", "oracle",
    ]
    input: Optional[str] = None
    generate: Optional[str] = None  # "kind:m"
    directed: bool = False
    ignore_weights: bool = False
    orientation: Optional[Literal["undirected", "in", "out"]] = None
    chain: Literal["dtmc", "ctmc"] = "dtmc"
    init: str = "degree"
    steps: Optional[int] = None
    times: Optional[List[float]] = None
    method: Literal["uniformization", "eigen"] = "uniformization"
    channel: Optional[str] = None
    axis: Literal["rows", "columns"] = "rows"
    paths: int = 100_000
    workers: int = 1
    vertices: int = 5
    output_format: Literal["csv", "json"] = "csv"
    seed: int = 0
    log_base: Literal["2", "e"] = "2"
    output: Optional[str] = None

    @field_validator("init")
    @classmethod
    def _check_init(cls, value: str) -> str:
        if value in ("uniform", "degree"):
            return value
        kind, _, arg = value.partition(":")
        if kind == "point":
            if not arg.isdigit():
                raise ValueError(f"point initial distribution needs a vertex index, got {value!r}")
            return value
        if kind == "file" and arg:
            return value
        raise ValueError(f"initial distribution must be uniform, degree, point:k or file:path, got {value!r}")

    @field_validator("generate")
    @classmethod
    def _check_generate(cls, value: Optional[str]) -> Optional[str]:
        if value is None:
            return value
        kind, _, m = value.partition(":")
        if kind not in ("ring", "complete", "star") or not m.isdigit():
            raise ValueError(f"--generate expects ring|complete|star:<m>, got {value!r}")
        return value

    @field_validator("seed")
    @classmethod
    def _check_seed(cls, value: int) -> int:
        if not -(1 << 63) <= value < (1 << 64):
            raise ValueError("seed must fit in 64 bits")
        return value % (1 << 64)

    @model_validator(mode="after")
    def _check_combination(self) -> "RunConfig":
        if self.command in GRAPH_COMMANDS or (self.command == "measures" and self.channel is None):
            if (self.input is None) == (self.generate is None):
                raise ValueError(f"{self.command} needs exactly one of --input or --generate")
        if self.command == "generate" and self.generate is None:
            raise ValueError("generate needs a graph kind and vertex count")
        if self.command in HORIZON_COMMANDS:
            if self.chain == "dtmc":
                if self.steps is None or self.times is not None:
                    raise ValueError("dtmc horizons are given with --steps")
                if self.steps < 0:
                    raise ValueError("--steps must be nonnegative")
            elif self.times is None or self.steps is not None:
                raise ValueError("ctmc horizons are given with --times or --linspace")
            if self.command == "simulate" and self.chain == "ctmc" and len(self.times) != 1:
                raise ValueError("simulate takes a single ctmc time")
        if self.paths < 1:
            raise ValueError("--paths must be positive")
        return self

    @property
    def base(self) -> float:
        return 2.0 if self.log_base == "2" else math.e


def parse_times(times: Optional[str], linspace: Optional[str]) -> Optional[List[float]]:
    """
    Turn --times t1,t2,... or --linspace start:stop:count into a grid.
    """
    if times is not None and linspace is not None:
        raise ValidationError("use either --times or --linspace, not both")
    if times is not None:
        try:
            return [float(t) for t in times.split(",") if t.strip()]
        except ValueError:
            raise ValidationError(f"malformed --times {times!r}") from None
    if linspace is not None:
        parts = linspace.split(":")
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        except (ValueError, IndexError):
            raise ValidationError(f"malformed --linspace {linspace!r}; expected start:stop:count") from None
        if len(parts) != 3 or count < 1:
            raise ValidationError(f"malformed --linspace {linspace!r}; expected start:stop:count")
        return np.linspace(start, stop, count).tolist()
    return None


class CliParser(argparse.ArgumentParser):
    """ArgumentParser that exits with status 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _add_graph_source(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--input",
        type=str,
        default=None,
        help="Edge-list file"
    )
    parser.add_argument(
        "--generate",
        type=str,
        default=None,
        help="Generated graph instead of a file: ring:<m>, complete:<m> or star:<m>"
    )
    parser.add_argument(
        "--directed",
        action="store_true",
        help="Treat the edge list as directed"
    )
    parser.add_argument(
        "--ignore-weights",
        action="store_true",
        help="Give every edge weight 1 before building chains"
    )
    parser.add_argument(
        "--orientation",
        type=str,
        default=None,
        choices=["undirected", "in", "out"],
        help="Adjacency orientation (default: undirected, or in for directed graphs)"
    )


def _add_chain(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--chain",
        type=str,
        default="dtmc",
        choices=["dtmc", "ctmc"],
        help="Chain kind (default: dtmc)"
    )


def _add_horizon(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--init",
        type=str,
        default="degree",
        help="Initial distribution: uniform, degree, point:k or file:path (default: degree)"
    )
    parser.add_argument(
        "--steps",
        type=int,
        default=None,
        help="DTMC horizon in steps"
    )
    parser.add_argument(
        "--times",
        type=str,
        default=None,
        help="CTMC time grid t1,t2,..."
    )
    parser.add_argument(
        "--linspace",
        type=str,
        default=None,
        help="CTMC time grid start:stop:count"
    )
    parser.add_argument(
        "--method",
        type=str,
        default="uniformization",
        choices=["uniformization", "eigen"],
        help="Matrix exponential method for CTMC transients (default: uniformization)"
    )


def _add_output(parser: argparse.ArgumentParser, default_format: str = "csv"):
    parser.add_argument(
        "--format",
        dest="output_format",
        type=str,
        default=default_format,
        choices=["csv", "json"],
        help=f"Output format (default: {default_format})"
    )
    parser.add_argument(
        "--output",
        type=str,
        default=None,
        help="Output file (default: stdout)"
    )
    parser.add_argument(
        "--log-base",
        type=str,
        default="2",
        choices=["2", "e"],
        help="Logarithm base for entropies and divergences (default: 2)"
    )
    parser.add_argument(
        "--debug",
        action="store_true",
        help="Enable debug logging on stderr"
    )


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per analysis."""
    parser = CliParser(
        prog="graphchains",
        description="Markov chains associated with graphs: equilibria, transients and entropy dynamics"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="Emit a ring, complete or star edge list")
    p.add_argument("--kind", type=str, required=True, choices=["ring", "complete", "star"])
    p.add_argument("--vertices", type=int, required=True, help="Vertex count")
    _add_output(p)

    p = sub.add_parser("build", help="Emit P (dtmc) or Q (ctmc) as JSON")
    _add_graph_source(p)
    _add_chain(p)
    _add_output(p)

    p = sub.add_parser("steady", help="Equilibrium distribution")
    _add_graph_source(p)
    _add_chain(p)
    _add_output(p)

    for name, text in (("transient", "Transient distribution trace"),
                       ("entropy-trace", "Shannon entropy along the transient"),
                       ("kl-trace", "D(pi(0) || pi(t)) along the transient")):
        p = sub.add_parser(name, help=text)
        _add_graph_source(p)
        _add_chain(p)
        _add_horizon(p)
        _add_output(p)

    p = sub.add_parser("measures", help="M1/M2 divergence measures of a channel or transition matrix")
    p.add_argument("--channel", type=str, default=None, help="Channel matrix CSV (one row per line)")
    p.add_argument("--axis", type=str, default="rows", choices=["rows", "columns"])
    _add_graph_source(p)
    _add_output(p)

    p = sub.add_parser("classify", help="Graph entropy and entropic classification")
    _add_graph_source(p)
    _add_output(p, default_format="json")

    p = sub.add_parser("simulate", help="Monte Carlo distribution at the horizon")
    _add_graph_source(p)
    _add_chain(p)
    _add_horizon(p)
    p.add_argument("--paths", type=int, default=100_000, help="Number of sampled walks (default: 100000)")
    p.add_argument("--seed", type=int, default=0, help="64-bit seed (default: 0)")
    p.add_argument("--workers", type=int, default=1, help="Simulation threads (default: 1)")
    _add_output(p)

    p = sub.add_parser("oracle", help="Brute-force minimum graph entropy over connected graphs")
    p.add_argument("--vertices", type=int, default=5, help="Vertex count (default: 5)")
    _add_output(p, default_format="json")

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Collect parsed arguments into a validated RunConfig."""
    values = {k: v for k, v in vars(args).items() if v is not None and k not in ("debug", "kind", "linspace")}
    if args.command == "generate":
        values["generate"] = f"{args.kind}:{args.vertices}"
    if "times" in values or getattr(args, "linspace", None) is not None:
        values["times"] = parse_times(getattr(args, "times", None), getattr(args, "linspace", None))
    return RunConfig(**values)


def load_graph(config: RunConfig) -> Graph:
    if config.generate is not None:
        if config.directed:
            raise ValidationError("generated graphs are undirected; drop --directed")
        kind, _, m = config.generate.partition(":")
        g = generate(kind, int(m))
    else:
        g = load_edge_list(config.input, directed=config.directed)
    return g.unweighted() if config.ignore_weights else g


def initial_pmf(config: RunConfig, g: Graph) -> np.ndarray:
    """Resolve --init against the graph."""
    m = g.num_vertices
    if config.init == "uniform":
        return uniform_pmf(m)
    if config.init == "degree":
        return degree_pmf(g, config.orientation)
    kind, _, arg = config.init.partition(":")
    if kind == "point":
        return point_pmf(m, int(arg))
    pmf = read_pmf(arg)
    if pmf.size != m:
        raise ValidationError(f"initial distribution has {pmf.size} entries, graph has {m} vertices")
    return pmf


def _build_chain(config: RunConfig, g: Graph):
    if config.chain == "dtmc":
        return dtmc_from_graph(g, config.orientation)
    return ctmc_from_graph(g, config.orientation)


def _horizon(config: RunConfig):
    return config.steps if config.chain == "dtmc" else config.times


def _emit_frame(config: RunConfig, frame):
    text = frame_to_csv(frame) if config.output_format == "csv" else frame_to_json(frame)
    emit(text, config.output)


def _emit_record(config: RunConfig, record: dict):
    if config.output_format == "json":
        emit(to_json(record), config.output)
    else:
        _emit_frame(config, pd.DataFrame([record]))


def run(config: RunConfig) -> int:
    """
    Execute one command.

    Args:
        config: Validated run configuration

    Returns:
        Exit status (0 on success; errors propagate as exceptions)
    """
    if config.command == "generate":
        kind, _, m = config.generate.partition(":")
        emit(format_edge_list(generate(kind, int(m))), config.output)
        return EXIT_OK

    if config.command == "oracle":
        _emit_record(config, min_entropy_oracle(config.vertices).to_dict())
        return EXIT_OK

    if config.command == "measures":
        if config.channel is not None:
            matrix = read_channel_matrix(config.channel)
        else:
            matrix = dtmc_from_graph(load_graph(config), config.orientation)
        _emit_record(config, channel_measures(matrix, config.axis, config.base).to_dict())
        return EXIT_OK

    g = load_graph(config)
    logger.debug("Loaded graph: %d vertices, %d edges", g.num_vertices, g.num_edges)

    if config.command == "classify":
        _emit_record(config, classify(g).to_dict())
        return EXIT_OK

    chain = _build_chain(config, g)

    if config.command == "build":
        emit(to_json(chain.to_dict()), config.output)
        return EXIT_OK

    if config.command == "steady":
        pmf = dtmc_equilibrium(chain) if config.chain == "dtmc" else ctmc_equilibrium(chain)
        _emit_frame(config, distribution_frame(pmf))
        return EXIT_OK

    pi0 = initial_pmf(config, g)
    index_name = "step" if config.chain == "dtmc" else "time"

    if config.command == "transient":
        if config.chain == "dtmc":
            result = dtmc_transient(chain, pi0, config.steps)
        else:
            result = ctmc_transient(chain, pi0, config.times, config.method)
        _emit_frame(config, result.to_frame())
    elif config.command == "entropy-trace":
        _emit_frame(config, entropy_trace(chain, pi0, _horizon(config), config.base).to_frame(index_name))
    elif config.command == "kl-trace":
        _emit_frame(config, kl_trace(chain, pi0, _horizon(config), config.base).to_frame(index_name))
    elif config.command == "simulate":
        horizon = config.steps if config.chain == "dtmc" else config.times[0]
        pmf = simulate_walk(chain, pi0, horizon, config.paths, config.seed, config.workers)
        _emit_frame(config, distribution_frame(pmf))
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Main function."""
    args = build_parser().parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.debug else logging.WARNING,
        format="[%(levelname)s] %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        return run(config_from_args(args))
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
