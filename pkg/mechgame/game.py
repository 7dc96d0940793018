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

"""Causal games: policies, expected utility and equilibrium selection.

RATIONALITY

Agents best-respond in every decision context.  For a decision D with
information parents Pa, the best response in context pa is the set of
actions d maximising

    sum over the owner's utilities U of  E[value(U) | pa, do(D=d)]

with every other decision rule held fixed.  Contexts of probability
zero make every action optimal and the first label wins.  With the
unreached_by_value option solve instead prefers the actions that are
best under do(Pa = pa) there, then label order.

SELECTION

Only deterministic rules are searched.  Rules of one decision are
ordered like enumerate_deterministic_cpts (first context most
significant, outcome label order within a context); profiles are
ordered by decision name and then rule order.  solve returns the first
profile in that order in which every rule picks the first best
response in every context.  An intervened decision is held fixed by
its intervention and gets no rule.
"""

import itertools

from . import core
from .core import MechGameError, CPT, Assignment, ZERO, _, _options
from .core import enumerate_deterministic_cpts, format_fraction
from .scm import Intervention, joint_distribution

DECISION = 'decision'
CHANCE = 'chance'
UTILITY = 'utility'
KINDS = (DECISION, CHANCE, UTILITY)


class CausalGame(object):
    """A finite Markovian causal game.

    agents         sorted agent ids
    graph          scm.ObjectGraph; the parents of a decision are its
                   information parents
    kind           variable -> 'decision' | 'chance' | 'utility'
    owners         decision or utility -> tuple of agent ids; exactly
                   one for a decision, one or more for a utility
    cpts           CPT of every non-decision variable
    utility_value  utility -> tuple of Fractions, one per outcome
    """

    def __init__(self, agents, graph, kind, owners, cpts, utility_value):
        self.agents = tuple(sorted(set(agents)))
        self.graph = graph
        self.kind = dict(kind)
        self.owners = dict((v, tuple(sorted(set(a)))) for v, a in owners.items())
        self.cpts = dict(cpts)
        self.utility_value = dict((u, tuple(vals))
                                  for u, vals in utility_value.items())
        self._check()

    def _check(self):
        agents = set(self.agents)
        for v in self.graph.variables:
            k = self.kind.get(v)
            if k not in KINDS:
                raise MechGameError(8, _('%s has kind %r') % (v, k))
            owners = self.owners.get(v, ())
            for a in owners:
                if a not in agents:
                    raise MechGameError(8, _('%s names unknown agent %r')
                                        % (v, a))
            if k == DECISION:
                if len(owners) != 1:
                    raise MechGameError(8, _('decision %s needs exactly one '
                                             'agent') % v)
                if v in self.cpts:
                    raise MechGameError(8, _('decision %s has a CPT') % v)
                continue
            if k == UTILITY:
                if not owners:
                    raise MechGameError(8, _('utility %s has no agent') % v)
                values = self.utility_value.get(v)
                if values is None or len(values) != len(self.graph.domains[v]):
                    raise MechGameError(8, _('utility %s needs one value per '
                                             'outcome') % v)
            elif owners:
                raise MechGameError(8, _('chance node %s has an agent') % v)
            cpt = self.cpts.get(v)
            if cpt is None:
                raise MechGameError(4, _('no CPT for %s') % v)
            if cpt.child != v or cpt.parents != self.graph.parents[v]:
                raise MechGameError(4, _('CPT of %s does not match its '
                                         'parents %s')
                                    % (v, ', '.join(self.graph.parents[v])))

    @property
    def domains(self):
        return self.graph.domains

    @property
    def decisions(self):
        return tuple(v for v in self.graph.variables if self.kind[v] == DECISION)

    @property
    def utilities(self):
        return tuple(v for v in self.graph.variables if self.kind[v] == UTILITY)

    @property
    def info_parents(self):
        return dict((d, self.graph.parents[d]) for d in self.decisions)

    def agent_of(self, decision):
        return self.owners[decision][0]

    def decisions_of(self, agent):
        return tuple(d for d in self.decisions if agent in self.owners[d])

    def utilities_of(self, agent):
        return tuple(u for u in self.utilities if agent in self.owners[u])

    def with_cpts(self, cpts):
        """Copy of the game with some non-decision CPTs replaced."""
        table = dict(self.cpts)
        table.update(cpts)
        return CausalGame(self.agents, self.graph, self.kind, self.owners,
                          table, self.utility_value)

    def __repr__(self):
        return '<CausalGame agents=%s decisions=%s>' % (
            ','.join(self.agents), ','.join(self.decisions))


class DecisionRule(object):
    """Deterministic decision rule: one action per information context,
    contexts in lexicographic order."""
    __slots__ = ('decision', 'parents', 'actions', 'parent_sizes')

    def __init__(self, decision, parents, actions, parent_sizes):
        self.decision = decision
        self.parents = tuple(parents)
        self.actions = tuple(actions)
        self.parent_sizes = tuple(parent_sizes)

    @classmethod
    def from_cpt(cls, cpt):
        return cls(cpt.child, cpt.parents, cpt.actions(), cpt.parent_sizes)

    def to_cpt(self, domains):
        return CPT.point(self.decision, self.parents, self.actions, domains)

    def contexts(self):
        return [Assignment.from_values(self.parents, values) for values in
                itertools.product(*[range(s) for s in self.parent_sizes])]

    @property
    def table(self):
        return dict(zip(self.contexts(), self.actions))

    def action(self, context):
        values = Assignment(context).values_for(self.parents)
        i = 0
        for v, s in zip(values, self.parent_sizes):
            i = i * s + v
        return self.actions[i]

    def __eq__(self, other):
        return isinstance(other, DecisionRule) and \
               (self.decision, self.parents, self.actions) == \
               (other.decision, other.parents, other.actions)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.decision, self.parents, self.actions))

    def __repr__(self):
        return '<DecisionRule %s %r>' % (self.decision, self.actions)


class PolicyProfile(object):
    """decision -> DecisionRule."""

    def __init__(self, rules):
        self.rules = dict(rules)

    def __getitem__(self, decision):
        return self.rules[decision]

    def __contains__(self, decision):
        return decision in self.rules

    def __len__(self):
        return len(self.rules)

    def derive(self, **rules):
        r = dict(self.rules)
        r.update(rules)
        return PolicyProfile(r)

    def __eq__(self, other):
        return isinstance(other, PolicyProfile) and self.rules == other.rules

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return '<PolicyProfile %s>' % ', '.join(
            '%s=%r' % (d, self.rules[d].actions) for d in sorted(self.rules))


def rule_space_size(game, decision):
    size = len(game.domains[decision])
    nrows = 1
    for p in game.graph.parents[decision]:
        nrows *= len(game.domains[p])
    return size ** nrows

def rule_at(game, decision, index):
    """The index-th rule of `decision` in canonical order."""
    parents = game.graph.parents[decision]
    sizes = tuple(len(game.domains[p]) for p in parents)
    size = len(game.domains[decision])
    nrows = 1
    for s in sizes:
        nrows *= s
    actions = []
    for j in range(nrows):
        actions.append((index // size ** (nrows - 1 - j)) % size)
    return DecisionRule(decision, parents, actions, sizes)

def decision_rules(game, decision, opts=None, **kwargs):
    """Every deterministic rule of `decision`, in canonical order."""
    return [DecisionRule.from_cpt(c) for c in enumerate_deterministic_cpts(
        decision, game.graph.parents[decision], game.domains, opts, **kwargs)]

def induced_scm(game, profile, interventions=()):
    """(graph, cpts) of the SCM the profile induces.

    Every decision needs a rule unless `interventions` replaces it, in
    which case the intervened CPT stands in for the rule.
    """
    cpts = dict(game.cpts)
    intervened = dict((iv.target, iv.replacement) for iv in interventions)
    for d in game.decisions:
        if d in profile:
            cpts[d] = profile[d].to_cpt(game.domains)
        elif d in intervened:
            cpts[d] = intervened[d]
        else:
            raise MechGameError(9, _('no rule for decision %s') % d)
    return game.graph, cpts

def expected_utility(game, profile, agent, interventions=()):
    """Exact expected utility of `agent` under profile and interventions."""
    if agent not in game.agents:
        raise MechGameError(8, _('unknown agent %r') % (agent,))
    utils = game.utilities_of(agent)
    if not utils:
        return ZERO
    graph, cpts = induced_scm(game, profile, interventions)
    joint = joint_distribution(graph, cpts, interventions)
    total = ZERO
    for a, p in joint.items():
        for u in utils:
            total += p * game.utility_value[u][a[u]]
    return total

def _context_values(game, profile, decision, interventions):
    """Context probabilities and per-action utility mass of `decision`.

    Returns (mass, value): mass[ctx] = P(ctx), value[ctx][d] =
    E[utility * 1{ctx} | do(decision=d)], ctx a tuple of parent
    outcome indices.  Contexts missing from `mass` have probability
    zero.
    """
    owner = game.agent_of(decision)
    utils = game.utilities_of(owner)
    parents = game.graph.parents[decision]
    size = len(game.domains[decision])
    others = [iv for iv in interventions if iv.target != decision]
    mass = {}
    value = {}
    for d in range(size):
        ivs = others + [Intervention.hard(decision, d, game.domains)]
        graph, cpts = induced_scm(game, profile, ivs)
        joint = joint_distribution(graph, cpts, ivs)
        for a, p in joint.items():
            ctx = a.values_for(parents)
            u = ZERO
            for U in utils:
                u += game.utility_value[U][a[U]]
            acc = value.get(ctx)
            if acc is None:
                acc = value[ctx] = [ZERO] * size
            acc[d] += p * u
            if d == 0:
                mass[ctx] = mass.get(ctx, ZERO) + p
    return mass, value

def _argmax(values):
    best = max(values)
    return frozenset(i for i, v in enumerate(values) if v == best)

def best_response_sets(game, profile, decision, interventions=()):
    """ctx tuple -> frozenset of optimal actions, for every context."""
    mass, value = _context_values(game, profile, decision, interventions)
    size = len(game.domains[decision])
    everything = frozenset(range(size))
    sizes = [len(game.domains[p]) for p in game.graph.parents[decision]]
    out = {}
    for ctx in itertools.product(*[range(s) for s in sizes]):
        if ctx in mass:
            out[ctx] = _argmax(value[ctx])
        else:
            out[ctx] = everything
    return out

def best_response_in_context(game, profile, decision, context, interventions=()):
    """Optimal actions of `decision` in one context (an Assignment or
    dict over its information parents)."""
    ctx = Assignment(context).values_for(game.graph.parents[decision])
    return best_response_sets(game, profile, decision, interventions)[ctx]

def _unreached_values(game, profile, decision, ctx, interventions):
    """Owner utility of each action under do(Pa = ctx, decision = d)."""
    utils = game.utilities_of(game.agent_of(decision))
    parents = game.graph.parents[decision]
    pinned = [Intervention.hard(p, i, game.domains)
              for p, i in zip(parents, ctx)]
    targets = set(parents) | set([decision])
    others = [iv for iv in interventions if iv.target not in targets]
    out = []
    for d in range(len(game.domains[decision])):
        ivs = others + pinned + [Intervention.hard(decision, d, game.domains)]
        graph, cpts = induced_scm(game, profile, ivs)
        total = ZERO
        for a, p in joint_distribution(graph, cpts, ivs).items():
            for U in utils:
                total += p * game.utility_value[U][a[U]]
        out.append(total)
    return out

def first_best_response(game, profile, decision, interventions=(),
                        opts=None, **kwargs):
    """The rule choosing the first optimal action in every context.

    Where the context is unreached every action is optimal and the first
    label wins, unless opts.unreached_by_value narrows the tie to the
    best actions under do(Pa = ctx) first.
    """
    opts = _options(opts, kwargs)
    mass, value = _context_values(game, profile, decision, interventions)
    parents = game.graph.parents[decision]
    sizes = tuple(len(game.domains[p]) for p in parents)
    actions = []
    for ctx in itertools.product(*[range(s) for s in sizes]):
        if ctx in mass:
            actions.append(min(_argmax(value[ctx])))
        elif opts.unreached_by_value:
            actions.append(min(_argmax(_unreached_values(
                game, profile, decision, ctx, interventions))))
        else:
            actions.append(0)
    return DecisionRule(decision, parents, actions, sizes)

def solve(game, interventions=(), opts=None, **kwargs):
    """First profile, in canonical order, that is a fixed point of
    first_best_response for every non-intervened decision."""
    opts = _options(opts, kwargs)
    fixed = set(iv.target for iv in interventions)
    decisions = [d for d in game.decisions if d not in fixed]
    if not decisions:
        return PolicyProfile({})
    spaces = [rule_space_size(game, d) for d in decisions]
    total = 1
    for n in spaces:
        total *= n
    if total > opts.profile_guard:
        raise MechGameError(6, _('%d deterministic profiles exceed the '
                                 'guard of %d') % (total, opts.profile_guard))
    if core.DEBUG:
        core.DEBUG.debug('solve: %d decisions, %d profiles', len(decisions), total)

    # the last decision's rule is a function of the others, so walking
    # the others in order finds fixed points in canonical order
    last = decisions[-1]
    head = decisions[:-1]
    for indices in itertools.product(*[range(n) for n in spaces[:-1]]):
        rules = dict((d, rule_at(game, d, i)) for d, i in zip(head, indices))
        rules[last] = first_best_response(game, PolicyProfile(rules), last,
                                          interventions, opts)
        profile = PolicyProfile(rules)
        if all(first_best_response(game, profile, d, interventions, opts)
               == rules[d] for d in head):
            if core.DEBUG: core.DEBUG.debug('solve: %r', profile)
            return profile
    raise MechGameError(256, _('no deterministic profile is a best response '
                               'for every decision'))

def describe_profile(game, profile):
    """One line per decision: 'D := 1' or 'D := {M=0 -> 0; M=1 -> 1}'."""
    return [profile[d].to_cpt(game.domains).describe(game.domains)
            for d in sorted(profile.rules)]

def describe_utilities(game, profile, interventions=()):
    return ['EU(%s) = %s' % (a, format_fraction(
        expected_utility(game, profile, a, interventions))) for a in game.agents]
