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

"""Graphviz DOT source for game graphs and mechanised graphs.

Decisions are squares, utilities diamonds, chance nodes circles and
mechanisms small filled black circles.  Information and mechanism
edges are dashed, terminal mechanism edges bold and dashed, functional
edges grey.  Every agent gets one colour from AGENT_COLOURS, in agent
order.  Nodes and edges are added in sorted order, so the same graph
always gives the same source.
"""

import graphviz

from .core import MechGameError, _
from .discovery import EdgeLabelledMechanisedGraph, GameGraph

AGENT_COLOURS = ('#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e',
                 '#8c564b', '#e377c2', '#17becf')

SHAPES = {'decision': 'box', 'utility': 'diamond', 'chance': 'circle'}

EDGE_STYLES = {
    'causal':   {},
    'info':     {'style': 'dashed'},
    'obj':      {},
    'func':     {'color': 'grey50'},
    'mech':     {'style': 'dashed'},
    'term':     {'penwidth': '2', 'style': 'bold,dashed'},
}


def _edges(dot, edges, style):
    for a, b in sorted(edges):
        dot.edge(a, b, **EDGE_STYLES[style])

def _agent_colours(agents):
    return dict((a, AGENT_COLOURS[i % len(AGENT_COLOURS)])
                for i, a in enumerate(agents))

def _game_dot(g, name):
    colours = _agent_colours(g.agents)
    dot = graphviz.Digraph(name=name)
    for v in g.nodes:
        owners = g.colour.get(v, ())
        if owners:
            dot.node(v, color=colours[owners[0]], penwidth='2',
                     shape=SHAPES[g.kind[v]])
        else:
            dot.node(v, shape=SHAPES[g.kind[v]])
    _edges(dot, g.causal_edges - g.info_edges, 'causal')
    _edges(dot, g.info_edges, 'info')
    return dot

def _mech_dot(c, name):
    dot = graphviz.Digraph(name=name)
    for v in c.object_nodes:
        dot.node(v, shape='circle')
    for m in c.mechanism_nodes:
        dot.node(m, label='', fillcolor='black', shape='circle',
                 style='filled', width='0.15', xlabel=m)
    _edges(dot, c.e_obj, 'obj')
    _edges(dot, c.e_func, 'func')
    _edges(dot, c.e_mech - c.e_term, 'mech')
    _edges(dot, c.e_term, 'term')
    return dot

def build_digraph(graph, kind=None, name=None):
    """graphviz.Digraph of a GameGraph (kind 'game') or an
    EdgeLabelledMechanisedGraph (kind 'mech')."""
    if kind is None:
        kind = isinstance(graph, GameGraph) and 'game' or 'mech'
    if kind == 'game' and isinstance(graph, GameGraph):
        return _game_dot(graph, name or 'game')
    if kind == 'mech' and isinstance(graph, EdgeLabelledMechanisedGraph):
        return _mech_dot(graph, name or 'mechanised')
    raise MechGameError(260, _('cannot export %r as a %s graph')
                        % (graph, kind))

def export_dot(graph, kind=None, name=None):
    """DOT source text; rendering it needs the Graphviz binaries, this
    does not."""
    return build_digraph(graph, kind, name).source
