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

"""Structural causal models over finite domains.

An SCM here is an acyclic ObjectGraph plus one CPT per variable; the
exogenous noise of each variable lives in its CPT rows.  Hard
interventions are constant CPTs, soft ones any other CPT over a subset
of the declared parents, and both go through the same substitution:

  >>> joint = joint_distribution(graph, cpts, [Intervention.hard('X', 1, graph.domains)])
  >>> marginal(joint, ['U'])
"""

import networkx as nx

from .core import MechGameError, Assignment, Distribution, CPT, ONE, ZERO, _


class ObjectGraph(object):
    """Acyclic graph over object-level variables.

    variables  sorted variable ids
    domains    variable -> core.Domain
    parents    variable -> ordered parent tuple
    """

    def __init__(self, variables, domains, parents):
        self.variables = tuple(sorted(variables))
        self.domains = dict((v, domains[v]) for v in self.variables
                            if v in domains)
        self.parents = {}
        g = nx.DiGraph()
        g.add_nodes_from(self.variables)
        for v in self.variables:
            if v not in self.domains:
                raise MechGameError(2, _('no domain for %s') % v)
            pa = tuple(parents.get(v, ()))
            for p in pa:
                if p == v:
                    raise MechGameError(7, _('self-loop on %s') % v)
                if p not in self.domains:
                    raise MechGameError(2, _('unknown parent %s of %s')
                                        % (p, v))
                g.add_edge(p, v)
            if len(set(pa)) != len(pa):
                raise MechGameError(4, _('repeated parent of %s') % v)
            self.parents[v] = pa
        if not nx.is_directed_acyclic_graph(g):
            cycle = nx.find_cycle(g)
            raise MechGameError(7, _('cycle in object graph: %s')
                                % ' -> '.join(a for a, b in cycle))
        self.dag = g
        self.order = tuple(nx.lexicographical_topological_sort(g))

    def children(self, v):
        return tuple(sorted(self.dag.successors(v)))

    def descendants(self, v):
        return nx.descendants(self.dag, v)

    def edges(self):
        return sorted(self.dag.edges())

    def __eq__(self, other):
        return isinstance(other, ObjectGraph) and \
               self.variables == other.variables and \
               self.parents == other.parents and \
               self.domains == other.domains

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return '<ObjectGraph %s>' % ', '.join('%s->%s' % e for e in self.edges())


class Intervention(object):
    """Replace the CPT of `target` with `replacement`.

    A constant replacement is a hard do(target=v); anything else is a
    soft intervention.  The replacement may drop parents but not add
    any.
    """
    __slots__ = ('target', 'replacement')

    def __init__(self, target, replacement):
        if replacement.child != target:
            raise MechGameError(12, _('intervention on %s carries a CPT for %s')
                                % (target, replacement.child))
        self.target = target
        self.replacement = replacement

    @classmethod
    def hard(cls, target, index, domains):
        return cls(target, CPT.constant(target, index, domains))

    def check(self, graph):
        if self.target not in graph.parents:
            raise MechGameError(2, _('intervention on unknown variable %s')
                                % self.target)
        extra = set(self.replacement.parents) - set(graph.parents[self.target])
        if extra:
            raise MechGameError(12, _('intervention on %s adds parents %s')
                                % (self.target, ', '.join(sorted(extra))))
        return self

    def __eq__(self, other):
        return isinstance(other, Intervention) and \
               self.target == other.target and \
               self.replacement == other.replacement

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.target, self.replacement))

    def __repr__(self):
        return '<Intervention %s>' % self.replacement.describe()


class _Undefined(object):
    """Result of conditioning on a probability-zero event."""
    def __bool__(self):
        return False
    __nonzero__ = __bool__
    def __repr__(self):
        return 'UNDEFINED'

UNDEFINED = _Undefined()


def substituted_cpts(graph, cpts, interventions=()):
    """`cpts` with every intervention applied, checked against graph."""
    table = dict(cpts)
    for iv in interventions:
        iv.check(graph)
        table[iv.target] = iv.replacement
    for v in graph.variables:
        cpt = table.get(v)
        if cpt is None:
            raise MechGameError(4, _('no CPT for %s') % v)
        if not set(cpt.parents) <= set(graph.parents[v]):
            raise MechGameError(4, _('CPT of %s reads %s, not all declared '
                                     'parents') % (v, ', '.join(cpt.parents)))
    return table

def joint_distribution(graph, cpts, interventions=()):
    """Exact joint over every object variable.

    Variables are expanded in topological order; branches of zero mass
    are pruned, so the result only holds the support.
    """
    table = substituted_cpts(graph, cpts, interventions)
    position = {}
    states = [((), ONE)]
    for v in graph.order:
        cpt = table[v]
        pos = [position[p] for p in cpt.parents]
        nxt = []
        for values, p in states:
            row = cpt.row_for([values[i] for i in pos])
            for k, m in enumerate(row):
                if m:
                    nxt.append((values + (k,), p * m))
        position[v] = len(position)
        states = nxt
    order = graph.order
    return Distribution([(Assignment.from_values(order, values), p)
                         for values, p in states],
                        space=graph.variables)

def marginal(joint, keep):
    """Exact marginal of a joint on the variables in `keep`."""
    keep = tuple(sorted(keep))
    if joint.space is not None:
        unknown = set(keep) - set(joint.space)
        if unknown:
            raise MechGameError(2, _('unknown variables %s')
                                % ', '.join(sorted(unknown)))
    mass = {}
    for a, p in joint.items():
        key = a.project(keep)
        mass[key] = mass.get(key, ZERO) + p
    return Distribution(mass, space=keep)

def variable_marginal(joint, var):
    """Marginal of one variable, keyed by outcome index."""
    mass = {}
    for a, p in joint.items():
        k = a[var]
        mass[k] = mass.get(k, ZERO) + p
    return Distribution(mass, space=(var,))

def conditional(joint, target, given):
    """P(target | given) keyed by outcome index, or UNDEFINED when the
    evidence has probability zero."""
    given = Assignment(given)
    if target in given:
        raise MechGameError(2, _('cannot condition %s on itself') % target)
    items = given.items()
    evidence = ZERO
    mass = {}
    for a, p in joint.items():
        if all(a[v] == i for v, i in items):
            evidence += p
            k = a[target]
            mass[k] = mass.get(k, ZERO) + p
    if not evidence:
        return UNDEFINED
    return Distribution(dict((k, m / evidence) for k, m in mass.items()),
                        space=(target,))
