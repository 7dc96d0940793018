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

# This file is part of mechgame, exact mechanised causal games and
# agent discovery from interventions.

"""Graph analysis on game graphs and mechanised graphs.

Nothing here touches probabilities: d-separation, strategic
reachability, the game graph -> mechanised graph conversion, agent
subgraphs and the roundtrip checks between the two graph kinds.
"""

import networkx as nx

from .core import MechGameError, _, mechanism_of
from .discovery import EdgeLabelledMechanisedGraph, GameGraph, identify_agents


def _as_dag(g):
    if isinstance(g, GameGraph):
        return g.dag()
    return g

def _check_nodes(dag, nodes):
    unknown = [n for n in nodes if n not in dag]
    if unknown:
        raise MechGameError(2, _('unknown nodes %s')
                            % ', '.join(sorted(map(str, unknown))))

# networkx 3.3 renamed d_separated
_is_d_separator = getattr(nx, 'is_d_separator', None) or nx.d_separated

def d_separated(dag, xs, ys, zs=()):
    """d-separation of xs and ys given zs.

    dag is a networkx.DiGraph or a GameGraph.
    """
    dag = _as_dag(dag)
    xs, ys, zs = set(xs), set(ys), set(zs)
    _check_nodes(dag, xs | ys | zs)
    if zs & (xs | ys):
        raise MechGameError(260, _('conditioning set overlaps the tested sets'))
    if xs & ys:
        return False
    if not xs or not ys:
        return True
    try:
        return _is_d_separator(dag, xs, ys, zs)
    except nx.NetworkXError as e:
        raise MechGameError(260, _('cannot test d-separation: %s') % e)

def _owner(g, d):
    if g.kind.get(d) != 'decision':
        raise MechGameError(260, _('%s is not a decision') % d)
    return g.colour[d][0]

def s_reachable(g, d, v):
    """Is v strategically relevant to decision d?

    A fresh parent v^ is added to v; v is s-reachable iff v^ is
    d-connected to the descendant utilities of d's agent given d and
    its parents.
    """
    if v == d:
        raise MechGameError(260, _('s-reachability of %s from itself') % d)
    agent = _owner(g, d)
    dag = g.dag().copy()
    _check_nodes(dag, [v])
    below = nx.descendants(dag, d)
    targets = set(u for u in g.utilities_of(agent) if u in below)
    if not targets:
        return False
    hat = ('hat', v)
    dag.add_edge(hat, v)
    family = set(dag.predecessors(d)) | set([d])
    return not d_separated(dag, [hat], targets, family)

def directed_path_avoiding(g, src, dst, avoid=()):
    """Is there a nonempty directed path src -> dst through none of
    `avoid`?  src and dst themselves are never avoided."""
    dag = _as_dag(g)
    _check_nodes(dag, [src, dst])
    if src == dst:
        return False
    keep = [n for n in dag if n not in set(avoid) or n in (src, dst)]
    return nx.has_path(dag.subgraph(keep), src, dst)

def mechanise(g):
    """Edge-labelled mechanised graph of a game graph.

    Every object node gets its mechanism; M_V -> M_D is a mechanism
    edge iff V is s-reachable from D, and terminal iff V is a utility
    of D's agent reached from D without passing its other utilities.
    """
    if not isinstance(g, GameGraph):
        raise MechGameError(260, _('mechanise needs a game graph'))
    e_mech = set()
    e_term = set()
    for agent in g.agents:
        utils = set(g.utilities_of(agent))
        for d in g.decisions_of(agent):
            for v in g.nodes:
                if v == d:
                    continue
                if s_reachable(g, d, v):
                    e_mech.add((mechanism_of(v), mechanism_of(d)))
                if v in utils and directed_path_avoiding(g, d, v, utils - set([v])):
                    e_term.add((mechanism_of(v), mechanism_of(d)))
    return EdgeLabelledMechanisedGraph(g.nodes, g.causal_edges | g.info_edges,
                                       e_mech, None, e_term)


class AgentSubgraph(object):
    """One agent's decisions and utilities with an edge (D, U) for every
    directed path D -> U avoiding the agent's other utilities."""

    def __init__(self, agent, nodes, edges):
        self.agent = agent
        self.nodes = frozenset(nodes)
        self.edges = frozenset(edges)

    def __repr__(self):
        return '<AgentSubgraph %s %s>' % (self.agent, sorted(self.edges))

def agent_subgraphs(g):
    out = {}
    for agent in g.agents:
        utils = set(g.utilities_of(agent))
        decisions = g.decisions_of(agent)
        edges = set()
        for d in decisions:
            for u in sorted(utils):
                if directed_path_avoiding(g, d, u, utils - set([u])):
                    edges.add((d, u))
        out[agent] = AgentSubgraph(agent, set(decisions) | utils, edges)
    return out

def decision_utility_subgraph(g):
    """networkx.DiGraph over every decision and utility, with the union
    of the agent subgraph edges."""
    du = nx.DiGraph()
    du.add_nodes_from(g.decisions + g.utilities)
    for sub in agent_subgraphs(g).values():
        du.add_edges_from(sub.edges)
    return du

def check_agent_components(g):
    """(ok, diagnostic): every weakly connected component of the
    decision-utility subgraph must be exactly one agent's decisions and
    utilities, with at least one of each."""
    subs = agent_subgraphs(g)
    du = decision_utility_subgraph(g)
    components = sorted((sorted(c) for c in nx.weakly_connected_components(du)))
    for comp in components:
        nodes = frozenset(comp)
        owners = [a for a, s in sorted(subs.items()) if s.nodes == nodes]
        if not owners:
            return False, _('component {%s} is not an agent subgraph') \
                   % ', '.join(comp)
        if not any(g.kind[n] == 'decision' for n in comp) or \
               not any(g.kind[n] == 'utility' for n in comp):
            return False, _('component {%s} needs a decision and a utility') \
                   % ', '.join(comp)
    return True, _('%d components, one per agent') % len(components)

check_assumption1 = check_agent_components


class RoundtripReport(object):
    """Outcome of a roundtrip check; reported, never raised."""

    def __init__(self, ok, precondition=True, diagnostic='', mismatches=()):
        self.ok = ok
        self.precondition = precondition
        self.diagnostic = diagnostic
        self.mismatches = list(mismatches)

    def to_dict(self):
        return {'ok': self.ok, 'precondition': self.precondition,
                'diagnostic': self.diagnostic, 'mismatches': self.mismatches}

    def __repr__(self):
        return '<RoundtripReport ok=%s %s>' % (self.ok, self.diagnostic)

def verify_left_inverse_game(g):
    """identify_agents(mechanise(g)) == g, for g passing
    check_agent_components; otherwise that check's failure."""
    ok, why = check_agent_components(g)
    if not ok:
        return RoundtripReport(False, False, _('agent components: %s') % why)
    back = identify_agents(mechanise(g))
    diffs = g.differences(back)
    if diffs:
        return RoundtripReport(False, True, _('game graph changed'), diffs)
    return RoundtripReport(True, True, _('game graph reproduced'))

def verify_left_inverse_mech(c):
    """mechanise(identify_agents(c)) == c, for c in which every
    mechanism with an incoming mechanism edge has an incoming terminal
    edge."""
    heads = set(b for a, b in c.e_mech)
    terminal_heads = set(b for a, b in c.e_term)
    missing = sorted(heads - terminal_heads)
    if missing:
        return RoundtripReport(False, False,
                               _('%s: incoming mechanism edge without an '
                                 'incoming terminal edge') % ', '.join(missing))
    back = mechanise(identify_agents(c))
    diffs = c.differences(back)
    if diffs:
        return RoundtripReport(False, True, _('mechanised graph changed'), diffs)
    return RoundtripReport(True, True, _('mechanised graph reproduced'))
