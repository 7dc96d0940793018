#!/usr/bin/python -t

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

"""graphops.py tests"""

import sys
import itertools

import networkx as nx
from hypothesis import given, settings
from hypothesis import strategies as st

from base_test_code import *

from mechgame.core import MechGameError, CPT, mechanism_of
from mechgame.discovery import GameGraph
from mechgame.graphops import d_separated, s_reachable, directed_path_avoiding
from mechgame.graphops import mechanise, agent_subgraphs, check_agent_components
from mechgame.graphops import check_assumption1
from mechgame.graphops import verify_left_inverse_game, verify_left_inverse_mech
from mechgame.scm import ObjectGraph, joint_distribution

component_fixtures = ['mouse', 'actor_critic', 'mamdp', 'recommender', 'zero']

def game_graph(name):
    return GameGraph.from_game(fixture_model(name).game)

def digraph(edges, nodes=()):
    g = nx.DiGraph()
    g.add_nodes_from(nodes)
    g.add_edges_from(edges)
    return g

@st.composite
def independence_cases(draw):
    """(graph, cpts, x, y, zs) on at most five binary variables."""
    n = draw(st.integers(min_value=2, max_value=5))
    names = ['V%d' % i for i in range(n)]
    doms = binary(*names)
    parents = {}
    cpts = {}
    for i, v in enumerate(names):
        pa = draw(st.lists(st.sampled_from(names[:i]), unique=True,
                           max_size=2)) if i else []
        parents[v] = tuple(sorted(pa))
        rows = []
        for _r in range(2 ** len(pa)):
            p = draw(st.fractions(min_value=0, max_value=1, max_denominator=4))
            rows.append([1 - p, p])
        cpts[v] = CPT(v, parents[v], rows, doms)
    x, y = draw(st.lists(st.sampled_from(names), min_size=2, max_size=2,
                         unique=True))
    rest = [v for v in names if v not in (x, y)]
    zs = draw(st.lists(st.sampled_from(rest), unique=True)) if rest else []
    return ObjectGraph(names, doms, parents), cpts, x, y, zs

def probability(joint, fixed):
    return sum(p for a, p in joint.items()
               if all(a[v] == i for v, i in fixed.items()))


class DSeparationTests(TestCase):
    def test_chain(self):
        g = digraph([('D', 'X'), ('X', 'U')])
        self.assertFalse(d_separated(g, ['D'], ['U']))
        self.assertTrue(d_separated(g, ['D'], ['U'], ['X']))

    def test_collider(self):
        """a collider blocks until it or a descendant is observed"""
        g = digraph([('A', 'C'), ('B', 'C'), ('C', 'E')])
        self.assertTrue(d_separated(g, ['A'], ['B']))
        self.assertFalse(d_separated(g, ['A'], ['B'], ['C']))
        self.assertFalse(d_separated(g, ['A'], ['B'], ['E']))

    def test_game_graph(self):
        """game graphs are accepted directly"""
        self.assertTrue(d_separated(game_graph('mouse'), ['D'], ['U'], ['X']))

    def test_errors(self):
        """unknown nodes raise 2, overlapping sets 260"""
        g = digraph([('A', 'B')])
        for args, code in (((['A'], ['Q']), 2), ((['A'], ['B'], ['A']), 260)):
            try:
                d_separated(g, *args)
            except MechGameError as e:
                self.assertEqual(e.errno, code)
            else:
                self.fail()

    def test_cycle(self):
        """a cyclic graph is rejected with errno 260"""
        g = digraph([('A', 'B'), ('B', 'C'), ('C', 'A')], ['D'])
        try:
            d_separated(g, ['A'], ['D'])
        except MechGameError as e:
            self.assertEqual(e.errno, 260)
        else:
            self.fail()

    def test_shared_and_empty_sets(self):
        g = digraph([('A', 'B')], ['C'])
        self.assertFalse(d_separated(g, ['A', 'C'], ['C']))
        self.assertTrue(d_separated(g, [], ['B']))

    @settings(max_examples=100, deadline=None)
    @given(independence_cases())
    def test_separation_implies_independence(self, case):
        """d-separated variables are exactly conditionally independent"""
        graph, cpts, x, y, zs = case
        dag = digraph(graph.edges(), graph.variables)
        if not d_separated(dag, [x], [y], zs):
            return
        joint = joint_distribution(graph, cpts)
        for zvals in itertools.product((0, 1), repeat=len(zs)):
            z = dict(zip(zs, zvals))
            pz = probability(joint, z)
            for xv, yv in itertools.product((0, 1), repeat=2):
                pxyz = probability(joint, dict(z, **{x: xv, y: yv}))
                pxz = probability(joint, dict(z, **{x: xv}))
                pyz = probability(joint, dict(z, **{y: yv}))
                self.assertEqual(pxyz * pz, pxz * pyz)


class ReachabilityTests(TestCase):
    def test_mouse(self):
        g = game_graph('mouse')
        self.assertTrue(s_reachable(g, 'D', 'X'))
        self.assertTrue(s_reachable(g, 'D', 'U'))

    def test_observed_parent(self):
        """a parent the decision sees is not strategically relevant"""
        g = game_graph('mamdp')
        self.assertFalse(s_reachable(g, 'D1', 'S1'))
        self.assertTrue(s_reachable(g, 'D1', 'X1'))

    def test_errors(self):
        g = game_graph('mouse')
        self.assertRaises(MechGameError, s_reachable, g, 'D', 'D')
        self.assertRaises(MechGameError, s_reachable, g, 'X', 'U')

    def test_recommender(self):
        """the reward is strategically relevant to the recommendation,
        the preference estimate it observes is not"""
        g = game_graph('recommender')
        self.assertTrue(s_reachable(g, 'D', 'U'))
        self.assertFalse(s_reachable(g, 'D', 'P'))
        self.assertFalse(s_reachable(g, 'D', 'H2'))

    def test_reachable_gives_mechanism_edge(self):
        """every s-reachable node's mechanism feeds the decision's"""
        for name in list_fixtures():
            g = game_graph(name)
            m = mechanise(g)
            for d in g.decisions:
                for v in g.nodes:
                    if v != d and s_reachable(g, d, v):
                        self.assertTrue((mechanism_of(v), mechanism_of(d))
                                        in m.e_mech, (name, d, v))

    def test_paths(self):
        g = digraph([('A', 'B'), ('B', 'C'), ('A', 'C')])
        self.assertTrue(directed_path_avoiding(g, 'A', 'C', ['B']))
        self.assertFalse(directed_path_avoiding(g, 'B', 'A'))
        self.assertFalse(directed_path_avoiding(g, 'A', 'A'))
        g.remove_edge('A', 'C')
        self.assertFalse(directed_path_avoiding(g, 'A', 'C', ['B']))


class MechaniseTests(TestCase):
    def test_mouse(self):
        """the mouse's game graph mechanises to the discovered graph"""
        self.assertEqual(mechanise(game_graph('mouse')), discovered('mouse'))

    def test_actor_critic(self):
        m = mechanise(game_graph('actor_critic'))
        into = lambda v: sorted(a for a, b in m.e_mech if b == v)
        self.assertEqual(into('M_A'), ['M_Q', 'M_Y'])
        self.assertEqual(into('M_Q'), ['M_A', 'M_R', 'M_S', 'M_W', 'M_Y'])
        self.assertEqual(m.e_term, frozenset([('M_Y', 'M_A'),
                                              ('M_W', 'M_Q')]))

    def test_recommender(self):
        """only the reward mechanism feeds the recommendation's; the
        preference dependency is not a strategic edge"""
        m = mechanise(game_graph('recommender'))
        self.assertEqual(set(m.e_mech), set([('M_U', 'M_D')]))
        self.assertEqual(set(m.e_term), set([('M_U', 'M_D')]))
        self.assertFalse(('M_H2', 'M_U') in m.e_mech)

    def test_needs_game_graph(self):
        self.assertRaises(MechGameError, mechanise, discovered('mouse'))


class ComponentTests(TestCase):
    def test_fixtures(self):
        for name in component_fixtures:
            ok, why = check_agent_components(game_graph(name))
            self.assertTrue(ok, '%s: %s' % (name, why))
        for name in component_failures:
            ok, why = check_agent_components(game_graph(name))
            self.assertFalse(ok, name)

    def test_named_check(self):
        self.assertTrue(check_assumption1 is check_agent_components)
        self.assertEqual(check_assumption1(game_graph('cirl'))[0], False)

    def test_subgraphs(self):
        subs = agent_subgraphs(game_graph('actor_critic'))
        self.assertEqual(subs['actor'].edges, frozenset([('A', 'Y')]))
        self.assertEqual(subs['critic'].nodes, frozenset(['Q', 'W']))


class RoundtripTests(TestCase):
    def test_game_roundtrip(self):
        """identify_agents undoes mechanise"""
        for name in component_fixtures:
            report = verify_left_inverse_game(game_graph(name))
            self.assertTrue(report.ok, '%s: %s %s' % (name, report.diagnostic,
                                                      report.mismatches))

    def test_game_precondition(self):
        report = verify_left_inverse_game(game_graph('ndu'))
        self.assertFalse(report.ok)
        self.assertFalse(report.precondition)
        self.assertTrue(report.diagnostic.startswith('agent components'))

    def test_mech_roundtrip(self):
        """mechanise undoes identify_agents on discovered graphs"""
        for name in ['mouse', 'actor_critic', 'mamdp', 'zero']:
            report = verify_left_inverse_mech(discovered(name))
            self.assertTrue(report.ok, '%s: %s %s' % (name, report.diagnostic,
                                                      report.mismatches))

    def test_mech_precondition(self):
        """the recommender's reward mechanism reads a non-terminal edge"""
        report = verify_left_inverse_mech(discovered('recommender'))
        self.assertFalse(report.ok)
        self.assertFalse(report.precondition)
        self.assertTrue('M_U' in report.diagnostic)
        self.assertEqual(report.to_dict()['precondition'], False)


def suite():
    tl = TestLoader()
    return tl.loadTestsFromModule(sys.modules[__name__])

if __name__ == '__main__':
    runner = TextTestRunner(stream=sys.stdout,descriptions=1,verbosity=2)
    runner.run(suite())
