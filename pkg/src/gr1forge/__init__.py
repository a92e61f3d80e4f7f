"""GR(1) synthesis: specification parsing, symbolic game solving, strategy
extraction, netlist generation and the AMBA AHB benchmark family."""
from .amba import ArbiterParams, MasterParams, SlaveParams, gen_arbiter, gen_master, gen_slave
from .bdd import BDD, NodeRef
from .circuit import BlifModel, Netlist, build_netlist, emit_blif, parse_blif
from .formula import SpecDocument
from .game import GameStructure, build_game
from .monitors import NormalizedGR1, normalize
from .parser import SpecError, parse_formula, parse_spec
from .pipeline import PipelineResult, prepare_game, run_pipeline
from .solver import is_realizable, solve, synthesize

__version__ = "0.1.0"

__all__ = [
    "ArbiterParams", "MasterParams", "SlaveParams", "gen_arbiter", "gen_master",
    "gen_slave", "BDD", "NodeRef", "BlifModel", "Netlist", "build_netlist",
    "emit_blif", "parse_blif", "SpecDocument", "GameStructure", "build_game",
    "NormalizedGR1", "normalize", "SpecError", "parse_formula", "parse_spec",
    "PipelineResult", "prepare_game", "run_pipeline", "is_realizable", "solve",
    "synthesize",
]
