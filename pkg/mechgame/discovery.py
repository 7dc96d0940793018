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

"""Agent discovery from interventional queries.

DESCRIPTION

  discover() finds the edge-labelled mechanised graph of whatever sits
  behind an InterventionalOracle, identify_agents() reads decisions,
  utilities and agents off its terminal edges, and discover_game()
  does both.  Nothing here looks inside the oracle: every fact comes
  from oracle.query().

LEAVE ONE OUT

  For every target node V and every other node W, all remaining nodes
  are intervened on in every combination, and W is varied.  If the
  distribution of V ever changes, W -> V is an edge.  Object nodes
  are set to each of their outcomes; mechanism nodes to each of their
  candidates.

TERMINAL EDGES

  A mechanism edge M_W -> M_V is terminal if M_V still responds to M_W
  once the children of W are cut by structural interventions, and no
  longer responds once the children of V are cut.

COST

  Probes are memoised per target, so the budget (opts.budget) counts
  distinct oracle queries.  Exhausting it raises MechGameError 259
  with the edges found so far in .partial; that set is a lower bound,
  never a guess.  With opts.pin_mechanisms an object target is probed
  with every other mechanism held at its first candidate.  With
  opts.workers > 1 the targets of each phase are shared out over
  threads; the result is the same set union.
"""

import itertools
from threading import Thread

import networkx as nx
from six.moves import _thread as thread

from . import core
from .core import MechGameError, CallbackObject, _, _options, _run_callback
from .core import distributions_equal, is_mechanism, mechanism_of, variable_of
from .oracle import OracleQuery, node_distribution
from .scm import Intervention

DECISION = 'decision'
CHANCE = 'chance'
UTILITY = 'utility'


class EdgeLabelledMechanisedGraph(object):
    """Object nodes, one mechanism node per object node, and four edge
    sets of (src, dst) pairs: e_obj, e_func, e_mech and e_term, with
    e_term a subset of e_mech.
    """

    def __init__(self, object_nodes, e_obj=(), e_mech=(), e_func=None,
                 e_term=()):
        self.object_nodes = tuple(sorted(object_nodes))
        self.mechanism_nodes = tuple(mechanism_of(v) for v in self.object_nodes)
        if e_func is None:
            e_func = [(mechanism_of(v), v) for v in self.object_nodes]
        self.e_obj = frozenset(tuple(e) for e in e_obj)
        self.e_mech = frozenset(tuple(e) for e in e_mech)
        self.e_func = frozenset(tuple(e) for e in e_func)
        self.e_term = frozenset(tuple(e) for e in e_term)
        self._check()

    def _check(self):
        objs = set(self.object_nodes)
        mechs = set(self.mechanism_nodes)
        def bad(msg, *args):
            return MechGameError(260, _(msg) % args)
        for a, b in self.e_obj:
            if a not in objs or b not in objs or a == b:
                raise bad('object edge %s -> %s', a, b)
        for a, b in self.e_mech:
            if a not in mechs or b not in mechs or a == b:
                raise bad('mechanism edge %s -> %s', a, b)
        incoming = dict((v, 0) for v in objs)
        for a, b in self.e_func:
            if a not in mechs or b not in objs:
                raise bad('functional edge %s -> %s', a, b)
            incoming[b] += 1
        for v, n in sorted(incoming.items()):
            if n != 1:
                raise bad('%s has %d mechanism parents', v, n)
        if not self.e_term <= self.e_mech:
            raise bad('terminal edges %s are not mechanism edges',
                      sorted(self.e_term - self.e_mech))
        if not nx.is_directed_acyclic_graph(self.object_dag()):
            raise bad('object-level edges contain a cycle')

    def object_dag(self):
        g = nx.DiGraph()
        g.add_nodes_from(self.object_nodes)
        g.add_edges_from(self.e_obj)
        return g

    def nodes(self):
        return self.object_nodes + self.mechanism_nodes

    def children(self, v):
        return sorted(b for a, b in self.e_obj if a == v)

    def __eq__(self, other):
        return isinstance(other, EdgeLabelledMechanisedGraph) and \
               self.object_nodes == other.object_nodes and \
               self.e_obj == other.e_obj and self.e_mech == other.e_mech and \
               self.e_func == other.e_func and self.e_term == other.e_term

    def __ne__(self, other):
        return not self == other

    def differences(self, other):
        out = []
        for name in ('e_obj', 'e_func', 'e_mech', 'e_term'):
            mine, theirs = getattr(self, name), getattr(other, name)
            for e in sorted(mine - theirs):
                out.append('%s: extra %s -> %s' % (name, e[0], e[1]))
            for e in sorted(theirs - mine):
                out.append('%s: missing %s -> %s' % (name, e[0], e[1]))
        if self.object_nodes != other.object_nodes:
            out.append('nodes differ')
        return out

    def to_dict(self):
        def edges(s):
            return [list(e) for e in sorted(s)]
        return {'object_nodes': list(self.object_nodes),
                'mechanism_nodes': list(self.mechanism_nodes),
                'e_obj': edges(self.e_obj), 'e_func': edges(self.e_func),
                'e_mech': edges(self.e_mech), 'e_term': edges(self.e_term)}

    def __repr__(self):
        return '<EdgeLabelledMechanisedGraph %d nodes, %d mech, %d term>' % (
            len(self.object_nodes), len(self.e_mech), len(self.e_term))


class GameGraph(object):
    """Typed DAG: kind maps every node to decision/chance/utility,
    colour maps decisions and utilities to a tuple of agent ids.
    info_edges are the causal edges into decisions."""

    def __init__(self, nodes, kind, colour, causal_edges, info_edges=None):
        self.nodes = tuple(sorted(nodes))
        self.kind = dict(kind)
        self.colour = dict((v, tuple(sorted(c))) for v, c in colour.items())
        self.causal_edges = frozenset(tuple(e) for e in causal_edges)
        if info_edges is None:
            info_edges = [(a, b) for a, b in self.causal_edges
                          if self.kind.get(b) == DECISION]
        self.info_edges = frozenset(tuple(e) for e in info_edges)
        self._check()

    @classmethod
    def from_game(cls, game):
        """The game graph of a game.CausalGame."""
        colour = dict((v, game.owners[v]) for v in game.graph.variables
                      if game.kind[v] != CHANCE)
        return cls(game.graph.variables, game.kind, colour, game.graph.edges())

    def _check(self):
        nodes = set(self.nodes)
        for v in self.nodes:
            k = self.kind.get(v)
            if k not in (DECISION, CHANCE, UTILITY):
                raise MechGameError(260, _('%s has kind %r') % (v, k))
            if (k == CHANCE) == bool(self.colour.get(v)):
                raise MechGameError(260, _('%s: only decisions and utilities '
                                           'are coloured') % v)
        for a, b in self.causal_edges | self.info_edges:
            if a not in nodes or b not in nodes:
                raise MechGameError(260, _('edge %s -> %s leaves the graph')
                                    % (a, b))
        for a, b in self.info_edges:
            if self.kind[b] != DECISION:
                raise MechGameError(260, _('information edge %s -> %s does '
                                           'not end in a decision') % (a, b))
        if not nx.is_directed_acyclic_graph(self.dag()):
            raise MechGameError(260, _('game graph has a cycle'))

    def dag(self):
        g = nx.DiGraph()
        g.add_nodes_from(self.nodes)
        g.add_edges_from(self.causal_edges | self.info_edges)
        return g

    def of_kind(self, k):
        return tuple(v for v in self.nodes if self.kind[v] == k)

    @property
    def decisions(self):
        return self.of_kind(DECISION)

    @property
    def utilities(self):
        return self.of_kind(UTILITY)

    @property
    def agents(self):
        out = set()
        for c in self.colour.values():
            out.update(c)
        return tuple(sorted(out))

    def decisions_of(self, agent):
        return tuple(d for d in self.decisions if agent in self.colour[d])

    def utilities_of(self, agent):
        return tuple(u for u in self.utilities if agent in self.colour[u])

    def parents(self, v):
        return tuple(sorted(self.dag().predecessors(v)))

    def colour_partition(self):
        groups = {}
        for v, c in self.colour.items():
            groups.setdefault(c, set()).add(v)
        return frozenset(frozenset(g) for g in groups.values())

    def __eq__(self, other):
        """Same nodes, kinds, edges and colour classes; agent names may
        differ."""
        return isinstance(other, GameGraph) and \
               self.nodes == other.nodes and self.kind == other.kind and \
               self.causal_edges | self.info_edges == \
               other.causal_edges | other.info_edges and \
               self.info_edges == other.info_edges and \
               self.colour_partition() == other.colour_partition()

    def __ne__(self, other):
        return not self == other

    def differences(self, other):
        out = []
        for v in sorted(set(self.nodes) | set(other.nodes)):
            a, b = self.kind.get(v), other.kind.get(v)
            if a != b:
                out.append('%s: %s vs %s' % (v, a, b))
        mine = self.causal_edges | self.info_edges
        theirs = other.causal_edges | other.info_edges
        for e in sorted(mine ^ theirs):
            out.append('edge %s -> %s in only one graph' % e)
        for e in sorted(self.info_edges ^ other.info_edges):
            out.append('information edge %s -> %s in only one graph' % e)
        if self.colour_partition() != other.colour_partition():
            out.append('colour classes differ')
        return out

    def to_dict(self):
        return {'nodes': list(self.nodes),
                'kind': dict((v, self.kind[v]) for v in self.nodes),
                'colour': dict((v, list(self.colour[v]))
                               for v in sorted(self.colour)),
                'causal_edges': [list(e) for e in sorted(self.causal_edges)],
                'info_edges': [list(e) for e in sorted(self.info_edges)]}

    def __repr__(self):
        return '<GameGraph decisions=%s utilities=%s agents=%d>' % (
            ','.join(self.decisions), ','.join(self.utilities),
            len(self.agents))


########################################################################
#                 PROBING
########################################################################

class _Prober:
    """Shared probe state for one discovery run: the budget counter, the
    edges found so far and the hard-setting cache.  Memos are per target
    and owned by whichever thread works on that target."""

    def __init__(self, oracle, opts):
        self.oracle = oracle
        self.opts = opts
        self.count = 0
        self.found = set()
        self._lock = thread.allocate_lock()
        self._hard = {}

    def vocabulary(self, node):
        if is_mechanism(node):
            return list(self.oracle.mechanism_candidates(variable_of(node)))
        return list(range(len(self.oracle.domain(node))))

    def hard(self, v, i):
        key = (v, i)
        iv = self._hard.get(key)
        if iv is None:
            iv = Intervention.hard(v, i, {v: self.oracle.domain(v)})
            self._hard[key] = iv
        return iv

    def add_edge(self, edge):
        self._lock.acquire()
        try:
            self.found.add(edge)
        finally:
            self._lock.release()

    def _charge(self, target):
        self._lock.acquire()
        try:
            budget = self.opts.budget
            if budget is not None and self.count >= budget:
                err = MechGameError(259, _('probe budget of %d exhausted; '
                                           'edges found so far are a lower '
                                           'bound') % budget)
                err.partial = frozenset(self.found)
                raise err
            self.count += 1
            return self.count
        finally:
            self._lock.release()

    def distribution(self, memo, target, context):
        """P(target | do(context)); context is a dict node -> value."""
        mech = []
        objs = []
        for node in sorted(context):
            if is_mechanism(node):
                mech.append((variable_of(node), context[node]))
            elif not (is_mechanism(target) and self.opts.collapse_objects):
                objs.append((node, context[node]))
        key = (tuple(mech), tuple(objs))
        hit = memo.get(key)
        if hit is not None:
            return hit
        count = self._charge(target)
        q = OracleQuery(dict(mech), [self.hard(v, i) for v, i in objs])
        d = node_distribution(self.oracle.query(q), target)
        memo[key] = d
        if self.opts.progress_obj:
            self.opts.progress_obj.update(count)
        if self.opts.probe_callback:
            _run_callback(self.opts.probe_callback,
                          CallbackObject(target=target, query=q, count=count))
        return d


def _responds(prober, memo, target, varied, vocab, fixed_nodes, vocabs):
    """True iff some setting of fixed_nodes and two values of `varied`
    give different distributions of target."""
    for values in itertools.product(*vocabs):
        context = dict(zip(fixed_nodes, values))
        first = None
        for w in vocab:
            context[varied] = w
            d = prober.distribution(memo, target, context)
            if first is None:
                first = d
            elif not distributions_equal(first, d):
                return True
    return False

def _run_targets(targets, work, opts):
    """Call work(target) for every target, over opts.workers threads."""
    if opts.workers <= 1 or len(targets) <= 1:
        for t in targets:
            work(t)
        return
    queue = list(targets)
    lock = thread.allocate_lock()
    errors = []

    class Worker(Thread):
        def run(self):
            while True:
                lock.acquire()
                try:
                    if errors or not queue:
                        return
                    t = queue.pop(0)
                finally:
                    lock.release()
                try:
                    work(t)
                except Exception as e:
                    lock.acquire()
                    errors.append(e)
                    lock.release()

    workers = [Worker() for _i in range(min(opts.workers, len(targets)))]
    for w in workers: w.start()
    for w in workers: w.join()
    if errors:
        raise errors[0]

def _leave_one_out(prober, nodes):
    edges = set()
    lock = thread.allocate_lock()
    collapse = prober.opts.collapse_objects
    pin = prober.opts.pin_mechanisms

    def pinned(target, n):
        return pin and not is_mechanism(target) and is_mechanism(n) \
               and n != mechanism_of(target)

    def work(target):
        memo = {}
        found = []
        others = [n for n in nodes if n != target]
        for w in others:
            if collapse and is_mechanism(target) and not is_mechanism(w):
                # object settings are dropped from mechanism probes
                continue
            if pinned(target, w):
                continue
            fixed = [n for n in others if n != w]
            if collapse and is_mechanism(target):
                fixed = [n for n in fixed if is_mechanism(n)]
            vocabs = []
            for n in fixed:
                vocab = prober.vocabulary(n)
                if pinned(target, n):
                    vocab = vocab[:1]
                vocabs.append(vocab)
            if _responds(prober, memo, target, w, prober.vocabulary(w),
                         fixed, vocabs):
                found.append((w, target))
                prober.add_edge((w, target))
                if core.DEBUG: core.DEBUG.debug('edge %s -> %s', w, target)
        if core.DEBUG:
            core.DEBUG.info('target %s: %d parents, %d probes so far',
                            target, len(found), prober.count)
        lock.acquire()
        try:
            edges.update(found)
        finally:
            lock.release()

    _run_targets(nodes, work, prober.opts)
    return edges

def leave_one_out(oracle, nodes=None, opts=None, **kwargs):
    """Directed edge set over `nodes` (default: every object and
    mechanism node of the oracle) by leave-one-out discovery."""
    opts = _options(opts, kwargs)
    if nodes is None:
        nodes = oracle.nodes()
    prober = _Prober(oracle, opts)
    _start_progress(opts, 'leave-one-out')
    edges = _leave_one_out(prober, list(nodes))
    _end_progress(opts, prober)
    return edges

def _start_progress(opts, text):
    if opts.progress_obj:
        opts.progress_obj.start(text=text, size=opts.budget)

def _end_progress(opts, prober):
    if opts.progress_obj:
        opts.progress_obj.end(prober.count)


def _cut_responds(prober, memo, w, v, mechs, cut, w_structural):
    """Does M_v respond to M_w with the mechanisms of `cut` set to
    structural interventions and every other mechanism to candidates?"""
    oracle = prober.oracle
    mw, mv = mechanism_of(w), mechanism_of(v)
    fixed = [m for m in mechs if m not in (mw, mv)]
    vocabs = []
    for m in fixed:
        if variable_of(m) in cut:
            vocabs.append(oracle.structural_interventions_for(variable_of(m)))
        else:
            vocabs.append(prober.vocabulary(m))
    if w_structural:
        vocab = oracle.structural_interventions_for(w)
    else:
        vocab = prober.vocabulary(mw)
    return _responds(prober, memo, mv, mw, vocab, fixed, vocabs)

def _terminal_edges(prober, graph_edges, objects, e_mech):
    """Label the terminal subset of e_mech."""
    mechs = [mechanism_of(v) for v in objects]
    children = dict((v, set()) for v in objects)
    for a, b in graph_edges:
        children[a].add(b)
    term = set()
    lock = thread.allocate_lock()
    by_target = {}
    for mw, mv in sorted(e_mech):
        by_target.setdefault(mv, []).append(mw)

    def work(mv):
        memo = {}
        v = variable_of(mv)
        found = []
        for mw in by_target[mv]:
            w = variable_of(mw)
            # M_v itself is never cut: it is what we watch
            added = _cut_responds(prober, memo, w, v, mechs,
                                  children[w] - set([v]), False)
            if not added:
                continue
            # when W is a child of V, cutting V's children covers M_W too
            removed = _cut_responds(prober, memo, w, v, mechs,
                                    children[v] - set([w]), w in children[v])
            if not removed:
                found.append((mw, mv))
                if core.DEBUG: core.DEBUG.debug('terminal %s -> %s', mw, mv)
        lock.acquire()
        try:
            term.update(found)
        finally:
            lock.release()

    _run_targets(sorted(by_target), work, prober.opts)
    return term

def discover(oracle, opts=None, **kwargs):
    """Edge-labelled mechanised graph behind `oracle`."""
    opts = _options(opts, kwargs)
    objects = list(oracle.object_variables())
    nodes = oracle.nodes()
    prober = _Prober(oracle, opts)
    _start_progress(opts, 'discover')
    edges = _leave_one_out(prober, nodes)
    e_obj = set((a, b) for a, b in edges
                if not is_mechanism(a) and not is_mechanism(b))
    e_mech = set((a, b) for a, b in edges if is_mechanism(a) and is_mechanism(b))
    e_func = set((a, b) for a, b in edges
                 if is_mechanism(a) and not is_mechanism(b))
    stray = edges - e_obj - e_mech - e_func
    heads = [b for a, b in e_func]
    single = all(heads.count(v) == 1 for v in objects)
    dag = nx.DiGraph()
    dag.add_nodes_from(objects)
    dag.add_edges_from(e_obj)
    if stray or not single or not nx.is_directed_acyclic_graph(dag):
        err = MechGameError(258, _('discovered graph is not a mechanised SCM'))
        err.edges = frozenset(edges)
        raise err
    e_term = _terminal_edges(prober, e_obj, objects, e_mech)
    _end_progress(opts, prober)
    if core.DEBUG:
        core.DEBUG.info('discover: %d probes, %d mechanism edges, %d terminal',
                        prober.count, len(e_mech), len(e_term))
    return EdgeLabelledMechanisedGraph(objects, e_obj, e_mech, e_func, e_term)

def identify_agents(g):
    """Game graph read off an edge-labelled mechanised graph.

    Heads of terminal edges are decisions, tails are utilities (a node
    that is both counts as a decision), the rest are chance nodes.
    Decisions and utilities joined by terminal edges share a colour;
    colours are agent1, agent2, ... in node order.
    """
    if not isinstance(g, EdgeLabelledMechanisedGraph):
        raise MechGameError(260, _('identify_agents needs an edge-labelled '
                                   'mechanised graph'))
    decisions = set(variable_of(b) for a, b in g.e_term)
    utilities = set(variable_of(a) for a, b in g.e_term) - decisions
    kind = {}
    for v in g.object_nodes:
        if v in decisions: kind[v] = DECISION
        elif v in utilities: kind[v] = UTILITY
        else: kind[v] = CHANCE

    term = nx.Graph()
    term.add_nodes_from(sorted(decisions | utilities))
    term.add_edges_from((variable_of(a), variable_of(b)) for a, b in g.e_term)
    colour = {}
    n = 0
    for v in sorted(decisions | utilities):
        if v in colour:
            continue
        n += 1
        agent = 'agent%d' % n
        for w in nx.bfs_tree(term, v):
            colour[w] = (agent,)
    info = [(a, b) for a, b in g.e_obj if b in decisions]
    return GameGraph(g.object_nodes, kind, colour, g.e_obj, info)

def discover_game(oracle, opts=None, **kwargs):
    return identify_agents(discover(oracle, opts, **kwargs))
