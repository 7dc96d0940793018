#   This library is free software; you can redistribute it and/or
#   modify it under the terms of the GNU Lesser General Public
#   License as published by the Free Software Foundation; either
#   version 2.1 of the License, or (at your option) any later version.
#
#   This library is distributed in the hope that it will be useful,
#   but WITHOUT ANY WARRANTY; without even the implied warranty of
#   MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the GNU
#   Lesser General Public License for more details.
#
#   You should have received a copy of the GNU Lesser General Public
#   License along with this library; if not, write to the
#      Free Software Foundation, Inc.,
#      59 Temple Place, Suite 330,
#      Boston, MA  02111-1307  USA


"""Exact mechanised causal games and agent discovery from interventions.

mechgame works with finite causal games (decision, chance and utility
variables over a DAG) and their mechanised form, in which every
variable V has a mechanism variable M_V holding its CPT.  All
probabilities are exact fractions.

  solve(game)             a subgame-perfect profile, chosen by a fixed
                          preference order over deterministic rules
  discover(oracle)        the edge-labelled mechanised graph behind an
                          interventional oracle, found by leave-one-out
                          probing, with terminal edges marked
  identify_agents(graph)  decisions, utilities and agents read off the
                          terminal edges
  mechanise(game_graph)   the mechanised graph a game graph implies,
                          via strategic reachability
  parse_model(text)       a MechanisedCausalGame from a model file

The command line tool (scripts/mechgame) wraps all of these; see
mechgame.cli.
"""

__version__ = '1.0.0'
__date__    = '2026/10/16'
__author__  = 'mechgame developers <mechgame-devel@example.org>'
__url__     = ''

from .core import MechGameError, MechGameOptions, default_options
from .core import Domain, Assignment, Distribution, CPT, set_logger
from .scm import ObjectGraph, Intervention, joint_distribution
from .game import CausalGame, PolicyProfile, solve, expected_utility
from .oracle import MechanisedCausalGame, ModelOracle, OracleQuery
from .discovery import discover, identify_agents, discover_game
from .discovery import EdgeLabelledMechanisedGraph, GameGraph
from .graphops import d_separated, s_reachable, mechanise
from .modelfile import parse_model, load_model, serialise_model
