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

"""Mechanised causal games behind an interventional query interface.

DESCRIPTION

  A MechanisedCausalGame adds a mechanism variable M_V to every object
  variable V.  The value of M_V is a CPT for V, drawn from a candidate
  list.  Non-decision mechanisms take their declared CPT unless a
  dependency rule says otherwise; decision mechanisms are whatever
  rule solve picks given all the others.

  An oracle answers queries: a set of mechanism interventions
  (pre-policy, agents adapt) plus a set of object interventions
  (post-policy, agents do not adapt).  The answer is a joint over
  object outcomes and mechanism values.  The mechanism part is always
  a point mass and does not depend on the object interventions.

DEPENDENCY RULES

  A rule for a non-decision variable V is an ordered list of cases.
  Each case maps some other non-decision mechanisms to CPTs (`when`)
  and names the CPT M_V takes if all of them match (`then`).  The first
  matching case wins; with none matching M_V keeps its declared CPT.
  Rules are iterated synchronously from the declared CPTs until nothing
  changes.

CANDIDATES

  Unless a model lists them explicitly, the candidates of a decision
  are all its deterministic rules and those of any other variable are
  its declared CPT followed by every other deterministic CPT.  A model
  listing candidates for some variable is in restricted mode: the
  discovery guarantees need the full candidate sets.

THREADS

  ModelOracle.query may be called from many threads; the respond memo
  is guarded by a lock and keeps the opts.memo_size most recently used
  responses.
"""

from collections import OrderedDict

from six.moves import _thread as thread

from . import core
from .core import MechGameError, Distribution, ZERO, _, _options
from .core import constant_cpts, enumerate_deterministic_cpts
from .core import mechanism_of, is_mechanism, variable_of
from .game import DECISION, solve
from .scm import Intervention, joint_distribution


class DependencyRule(object):
    """Ordered (when, then) cases; `when` maps variable -> CPT."""

    def __init__(self, variable, cases):
        self.variable = variable
        self.cases = tuple((dict(when), then) for when, then in cases)
        for when, then in self.cases:
            if then.child != variable:
                raise MechGameError(8, _('dependency rule of %s yields a CPT '
                                         'for %s') % (variable, then.child))
            if variable in when:
                raise MechGameError(8, _('dependency rule of %s reads its own '
                                         'mechanism') % variable)

    def reads(self):
        out = set()
        for when, then in self.cases:
            out.update(when)
        return sorted(out)

    def evaluate(self, values, default):
        for when, then in self.cases:
            if all(values.get(v) == cpt for v, cpt in when.items()):
                return then
        return default

    def __repr__(self):
        return '<DependencyRule %s reads %s>' % (self.variable,
                                                 ','.join(self.reads()))


def default_candidates(game, v, opts=None, **kwargs):
    parents = game.graph.parents[v]
    every = enumerate_deterministic_cpts(v, parents, game.domains, opts, **kwargs)
    if game.kind[v] == DECISION:
        return every
    declared = game.cpts[v]
    return [declared] + [c for c in every if c != declared]


class MechanisedCausalGame(object):
    """Ground truth: a causal game plus mechanism candidates and
    dependency rules.

    candidates    variable -> CPT list; missing entries get defaults
    dependencies  non-decision variable -> DependencyRule
    structural    variable -> extra parent-independent CPTs usable as
                  structural interventions
    metadata      document metadata (name, source, description)
    """

    def __init__(self, game, candidates=None, dependencies=None,
                 structural=None, name=None, metadata=None, opts=None,
                 **kwargs):
        opts = _options(opts, kwargs)
        self.game = game
        self.metadata = dict(metadata or {})
        self.name = name or self.metadata.get('name')
        candidates = dict(candidates or {})
        self.restricted = frozenset(candidates)
        self.candidates = {}
        for v in game.graph.variables:
            if v in candidates:
                cands = list(candidates[v])
            else:
                cands = default_candidates(game, v, opts)
            self.candidates[v] = tuple(cands)
        self.dependencies = dict(dependencies or {})
        self.structural = dict((v, tuple(c)) for v, c in (structural or {}).items())
        self._check()

    def _check(self):
        game = self.game
        for v in game.graph.variables:
            cands = self.candidates[v]
            if not cands:
                raise MechGameError(8, _('no mechanism candidates for %s') % v)
            for c in cands:
                if c.child != v or c.parents != game.graph.parents[v]:
                    raise MechGameError(4, _('candidate CPT for %s does not '
                                             'match its parents') % v)
            if game.kind[v] != DECISION and game.cpts[v] not in cands:
                raise MechGameError(8, _('declared CPT of %s is not among '
                                         'its candidates') % v)
            for c in self.structural.get(v, ()):
                if c.child != v or not c.is_constant:
                    raise MechGameError(8, _('structural intervention for %s '
                                             'depends on its parents') % v)
        for v, rule in self.dependencies.items():
            if v not in game.kind:
                raise MechGameError(2, _('dependency rule for unknown '
                                         'variable %s') % v)
            if game.kind[v] == DECISION:
                raise MechGameError(8, _('decision %s cannot have a dependency '
                                         'rule') % v)
            for r in rule.reads():
                if r not in game.kind:
                    raise MechGameError(2, _('dependency rule of %s reads '
                                             'unknown %s') % (v, r))
                if game.kind[r] == DECISION:
                    raise MechGameError(8, _('dependency rule of %s reads '
                                             'decision mechanism %s') % (v, r))

    @property
    def variables(self):
        return self.game.graph.variables

    @property
    def domains(self):
        return self.game.domains

    def is_restricted(self):
        return bool(self.restricted)

    def __repr__(self):
        return '<MechanisedCausalGame %s>' % (self.name or '')


class MechanismAssignment(object):
    """variable -> CPT, complete over the object variables."""
    __slots__ = ('values', '_hash')

    def __init__(self, values):
        self.values = dict(values)
        self._hash = hash(frozenset(self.values.items()))

    def __getitem__(self, v):
        return self.values[v]

    def items(self):
        return sorted(self.values.items())

    def __eq__(self, other):
        return isinstance(other, MechanismAssignment) and \
               self.values == other.values

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return '<MechanismAssignment %s>' % '; '.join(
            c.describe() for v, c in self.items())


class OracleQuery(object):
    """Mechanism interventions (variable -> CPT) and object
    interventions (scm.Intervention list)."""
    __slots__ = ('mech_interventions', 'object_interventions', '_key')

    def __init__(self, mech_interventions=None, object_interventions=()):
        self.mech_interventions = dict(mech_interventions or {})
        self.object_interventions = tuple(sorted(object_interventions,
                                                 key=lambda iv: iv.target))
        self._key = (frozenset(self.mech_interventions.items()),
                     self.object_interventions)

    def check(self, model):
        graph = model.game.graph
        for v, cpt in self.mech_interventions.items():
            if v not in graph.parents:
                raise MechGameError(2, _('mechanism intervention on unknown '
                                         'variable %s') % v)
            if cpt.child != v or cpt.parents != graph.parents[v]:
                raise MechGameError(12, _('mechanism intervention on %s must '
                                          'read exactly %s')
                                    % (v, ', '.join(graph.parents[v]) or '()'))
        targets = set()
        for iv in self.object_interventions:
            iv.check(graph)
            if iv.target in targets:
                raise MechGameError(12, _('two interventions on %s') % iv.target)
            targets.add(iv.target)
        return self

    def __eq__(self, other):
        return isinstance(other, OracleQuery) and self._key == other._key

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return '<OracleQuery mech=%s obj=%s>' % (
            sorted(self.mech_interventions), [iv.target for iv in
                                              self.object_interventions])


def _resolve_dependencies(model, values):
    """Non-decision mechanisms after iterating the dependency rules."""
    game = model.game
    free = [v for v in game.graph.variables
            if v not in values and game.kind[v] != DECISION]
    current = dict(values)
    for v in free:
        current[v] = game.cpts[v]
    ruled = [v for v in free if v in model.dependencies]
    if not ruled:
        return current
    bound = 1
    for v in free:
        bound *= len(model.candidates[v])
    for _step in range(bound + 1):
        nxt = dict(current)
        for v in ruled:
            nxt[v] = model.dependencies[v].evaluate(current, game.cpts[v])
        if nxt == current:
            return current
        current = nxt
    raise MechGameError(257, _('dependency rules of %s do not settle')
                        % ', '.join(ruled))

def respond(model, mech_interventions, opts=None, **kwargs):
    """Mechanism values after the agents adapt to `mech_interventions`."""
    opts = _options(opts, kwargs)
    game = model.game
    values = dict(mech_interventions)
    current = _resolve_dependencies(model, values)
    decisions = game.decisions
    resolved = game.with_cpts(dict((v, c) for v, c in current.items()
                                   if v not in decisions))
    fixed = [Intervention(d, values[d]) for d in decisions if d in values]
    profile = solve(resolved, fixed, opts)
    for d in decisions:
        if d not in values:
            current[d] = profile[d].to_cpt(game.domains)
    return MechanismAssignment(current)

def _object_joint(model, mechanisms, object_interventions):
    game = model.game
    return joint_distribution(game.graph, mechanisms.values,
                              object_interventions)

def query(model, q, opts=None, **kwargs):
    """Joint over (object Assignment, MechanismAssignment) pairs."""
    q.check(model)
    mechanisms = respond(model, q.mech_interventions, opts, **kwargs)
    return _pair_with(_object_joint(model, mechanisms, q.object_interventions),
                      mechanisms)

def _pair_with(joint, mechanisms):
    return Distribution([((a, mechanisms), p) for a, p in joint.items()],
                        space=('objects', 'mechanisms'))

def mechanism_value_distribution(model, q, opts=None, **kwargs):
    """variable -> CPT, the mechanism point mass of query(model, q)."""
    q.check(model)
    return dict(respond(model, q.mech_interventions, opts, **kwargs).values)

def structural_interventions_for(model, v):
    """Parent-independent CPTs for v: its constant CPTs, then any the
    model registers."""
    game = model.game
    out = constant_cpts(v, game.graph.parents[v], game.domains)
    for c in model.structural.get(v, ()):
        if c not in out:
            out.append(c)
    return out

def node_distribution(response, node):
    """Distribution of one node of a query response: outcome indices
    for an object node, CPTs for a mechanism node."""
    mass = {}
    if is_mechanism(node):
        v = variable_of(node)
        for (a, mechs), p in response.items():
            k = mechs[v]
            mass[k] = mass.get(k, ZERO) + p
    else:
        for (a, mechs), p in response.items():
            k = a[node]
            mass[k] = mass.get(k, ZERO) + p
    return Distribution(mass, space=(node,))


class InterventionalOracle(object):
    """What discovery is allowed to see.

    object_variables()                    sorted object variable ids
    domain(v)                             core.Domain of v
    mechanism_candidates(v)               the values M_v can be set to
    structural_interventions_for(v)       parent-independent CPTs for v
    query(q)                              joint for an OracleQuery
    """

    def object_variables(self):
        raise NotImplementedError()

    def domain(self, v):
        raise NotImplementedError()

    def mechanism_candidates(self, v):
        raise NotImplementedError()

    def structural_interventions_for(self, v):
        raise NotImplementedError()

    def query(self, q):
        raise NotImplementedError()

    def nodes(self):
        """Object nodes then mechanism nodes, each sorted."""
        objs = list(self.object_variables())
        return objs + [mechanism_of(v) for v in objs]


class ModelOracle(InterventionalOracle):
    """Answers queries from a MechanisedCausalGame.

    respond results are memoised per mechanism-intervention set; the
    memo is shared between threads.
    """

    def __init__(self, model, opts=None, **kwargs):
        self.model = model
        self.opts = _options(opts, kwargs)
        self._lock = thread.allocate_lock()
        self._memo = OrderedDict()
        self.hits = 0
        self.misses = 0

    def object_variables(self):
        return self.model.variables

    def domain(self, v):
        return self.model.domains[v]

    def mechanism_candidates(self, v):
        return self.model.candidates[v]

    def structural_interventions_for(self, v):
        return structural_interventions_for(self.model, v)

    def respond(self, mech_interventions):
        key = frozenset(mech_interventions.items())
        self._lock.acquire()
        try:
            hit = self._memo.get(key)
            if hit is not None:
                self.hits += 1
                self._memo.move_to_end(key)
        finally:
            self._lock.release()
        if hit is not None:
            return hit
        result = respond(self.model, mech_interventions, self.opts)
        self._lock.acquire()
        try:
            self._memo[key] = result
            self.misses += 1
            while len(self._memo) > self.opts.memo_size:
                self._memo.popitem(last=False)
        finally:
            self._lock.release()
        return result

    def clear_memo(self):
        self._lock.acquire()
        try:
            self._memo.clear()
        finally:
            self._lock.release()

    def query(self, q):
        q.check(self.model)
        mechanisms = self.respond(q.mech_interventions)
        return _pair_with(_object_joint(self.model, mechanisms,
                                        q.object_interventions), mechanisms)

    def log_statistics(self):
        if core.DEBUG:
            core.DEBUG.info('oracle: %d respond calls, %d memo hits',
                            self.hits + self.misses, self.hits)
