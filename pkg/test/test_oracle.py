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

"""oracle.py tests"""

import sys

from base_test_code import *

from mechgame.core import MechGameError, CPT
from mechgame.game import CausalGame, PolicyProfile, decision_rules
from mechgame.game import expected_utility
from mechgame.oracle import DependencyRule, MechanisedCausalGame
from mechgame.oracle import ModelOracle, OracleQuery, respond, query
from mechgame.oracle import node_distribution, structural_interventions_for
from mechgame.oracle import mechanism_value_distribution, default_candidates
from mechgame.scm import Intervention, ObjectGraph


def flip_flop():
    """Two chance variables whose dependency rules never settle."""
    doms = binary('A', 'B')
    graph = ObjectGraph(['A', 'B'], doms, {})
    a0, a1 = bern('A', 0, doms), bern('A', 1, doms)
    b0, b1 = bern('B', 0, doms), bern('B', 1, doms)
    game = CausalGame([], graph, {'A': 'chance', 'B': 'chance'}, {},
                      {'A': a0, 'B': b0}, {})
    rules = {'A': DependencyRule('A', [({'B': b0}, a1)]),
             'B': DependencyRule('B', [({'A': a1}, b1)])}
    return MechanisedCausalGame(game, {'A': [a0, a1], 'B': [b0, b1]}, rules)


class RespondTests(TestCase):
    def test_mouse_policy_table(self):
        """the mouse's rule follows the cheese mechanism"""
        model = fixture_model('mouse')
        got = [respond(model, {'X': c})['D'].actions()
               for c in model.candidates['X']]
        self.assertEqual(got, [(1,), (0,), (1,), (0,), (0,)])

    def test_default_candidates(self):
        """declared CPT first, then the deterministic ones in order"""
        model = fixture_model('mouse')
        cands = default_candidates(model.game, 'X')
        self.assertEqual(cands[0], model.game.cpts['X'])
        self.assertEqual([c.actions() for c in cands[1:]],
                         [(0, 0), (0, 1), (1, 0), (1, 1)])
        self.assertEqual(len(default_candidates(model.game, 'D')), 2)
        self.assertFalse(model.is_restricted())

    def test_dependency(self):
        """the reward mechanism follows the preference mechanism, and the
        recommender follows the reward"""
        model = fixture_model('recommender')
        self.assertTrue(model.is_restricted())
        declared = respond(model, {})
        self.assertEqual(declared['U'], model.game.cpts['U'])
        self.assertEqual(declared['D'].actions(), (0, 1))
        stays = model.candidates['H2'][1]
        moved = respond(model, {'H2': stays})
        self.assertEqual(moved['U'].actions(), (0, 1, 1, 0))
        self.assertEqual(moved['D'].actions(), (1, 0))

    def test_intervened_rule_wins(self):
        """a mechanism intervention on a ruled variable overrides the rule"""
        model = fixture_model('recommender')
        stays = model.candidates['H2'][1]
        u = model.game.cpts['U']
        self.assertEqual(respond(model, {'H2': stays, 'U': u})['U'], u)

    def test_no_fixed_point(self):
        """rules that never settle raise errno 257"""
        try:
            respond(flip_flop(), {})
        except MechGameError as e:
            self.assertEqual(e.errno, 257)
        else:
            self.fail()
        # pinning one side settles the other
        model = flip_flop()
        b1 = model.candidates['B'][1]
        self.assertEqual(respond(model, {'B': b1})['A'],
                         model.candidates['A'][0])

    def test_idempotent(self):
        """feeding a response's chance and utility values back in changes
        nothing"""
        for name, mechs in (('mouse', {}), ('recommender', {}),
                            ('recommender', {'H2': 1})):
            model = fixture_model(name)
            ivs = dict((v, model.candidates[v][i]) for v, i in mechs.items())
            first = respond(model, ivs)
            decisions = model.game.decisions
            again = respond(model, dict((v, c) for v, c in first.items()
                                        if v not in decisions))
            self.assertEqual(again, first, name)

    def test_everything_intervened(self):
        """with every mechanism intervened the response is the
        intervention itself"""
        for name in ('mouse', 'recommender', 'actor_critic'):
            model = fixture_model(name)
            ivs = dict((v, model.candidates[v][-1]) for v in model.variables)
            self.assertEqual(respond(model, ivs).values, ivs, name)

    def test_fixed_actor(self):
        """with the actor's rule fixed the critic has one best rule"""
        model = fixture_model('actor_critic')
        game = model.game
        for a in (0, 1):
            fixed = CPT.point('A', (), (a,), game.domains)
            iv = Intervention('A', fixed)
            values = [expected_utility(game, PolicyProfile({'Q': rule}),
                                       'critic', [iv])
                      for rule in decision_rules(game, 'Q')]
            best = [i for i, v in enumerate(values) if v == max(values)]
            self.assertEqual(len(best), 1, a)
            chosen = respond(model, {'A': fixed})['Q']
            self.assertEqual(chosen.actions(),
                             decision_rules(game, 'Q')[best[0]].actions)
            self.assertEqual(chosen.actions(), (1,))

    def test_no_decisions(self):
        """without decisions or rules nothing responds to anything"""
        model = fixture_model('zero')
        for c in model.candidates['X']:
            got = respond(model, {'X': c})
            self.assertEqual(got['Y'], model.game.cpts['Y'])
            self.assertEqual(got['Z'], model.game.cpts['Z'])


class QueryTests(TestCase):
    def test_object_intervention(self):
        """object interventions act after the policy is fixed"""
        model = fixture_model('mouse')
        iv = Intervention.hard('X', 1, model.domains)
        q = OracleQuery({}, [iv])
        resp = query(model, q)
        self.assertEqual(node_distribution(resp, 'U')[1], F('9/10'))
        mech = node_distribution(resp, 'M_D')
        self.assertTrue(mech.is_point_mass())
        self.assertEqual(mech.outcome().actions(), (1,))
        self.assertEqual(mechanism_value_distribution(model, q),
                         mechanism_value_distribution(model, OracleQuery()))

    def test_bad_queries(self):
        """unknown targets raise 2; parent mismatches and double
        interventions raise 12"""
        model = fixture_model('mouse')
        doms = model.domains
        hard = Intervention.hard('X', 0, doms)
        cases = [
            (OracleQuery({'Q': bern('X', 0, doms)}), 2),
            (OracleQuery({'X': bern('X', 0, doms)}), 12),
            (OracleQuery({}, [hard, Intervention.hard('X', 1, doms)]), 12),
        ]
        for q, code in cases:
            try:
                q.check(model)
            except MechGameError as e:
                self.assertEqual(e.errno, code, repr(q))
            else:
                self.fail('accepted %r' % q)

    def test_query_identity(self):
        doms = fixture_model('mouse').domains
        a = OracleQuery({}, [Intervention.hard('X', 0, doms),
                             Intervention.hard('U', 1, doms)])
        b = OracleQuery({}, [Intervention.hard('U', 1, doms),
                             Intervention.hard('X', 0, doms)])
        self.assertEqual(a, b)
        self.assertEqual(hash(a), hash(b))

    def test_structural(self):
        """structural interventions are the constant CPTs"""
        model = fixture_model('mouse')
        cpts = structural_interventions_for(model, 'X')
        self.assertEqual(len(cpts), 2)
        for c in cpts:
            self.assertTrue(c.is_constant)
            self.assertEqual(c.parents, ('D',))


class ModelOracleTests(TestCase):
    def test_memo(self):
        """respond runs once per mechanism intervention set"""
        oracle = ModelOracle(fixture_model('mouse'))
        doms = oracle.model.domains
        oracle.query(OracleQuery())
        oracle.query(OracleQuery({}, [Intervention.hard('X', 1, doms)]))
        self.assertEqual(oracle.misses, 1)
        self.assertEqual(oracle.hits, 1)

    def test_memo_bounded(self):
        """the memo keeps only the most recently used responses"""
        model = fixture_model('mouse')
        oracle = ModelOracle(model, memo_size=2)
        first, second, third = [OracleQuery({'X': c})
                                for c in model.candidates['X'][:3]]
        oracle.query(first)
        oracle.query(second)
        oracle.query(first)
        oracle.query(third)
        self.assertEqual(len(oracle._memo), 2)
        self.assertEqual((oracle.misses, oracle.hits), (3, 1))
        oracle.query(first)
        self.assertEqual(oracle.hits, 2)
        oracle.query(second)
        self.assertEqual(oracle.misses, 4)
        oracle.clear_memo()
        self.assertEqual(len(oracle._memo), 0)

    def test_interface(self):
        oracle = ModelOracle(fixture_model('mouse'))
        self.assertEqual(list(oracle.object_variables()), ['D', 'U', 'X'])
        self.assertEqual(oracle.nodes(),
                         ['D', 'U', 'X', 'M_D', 'M_U', 'M_X'])
        self.assertEqual(len(oracle.domain('X')), 2)


class ModelCheckTests(TestCase):
    def setUp(self):
        self.game = fixture_model('mouse').game
        self.doms = self.game.domains

    def test_rule_checks(self):
        """dependency rules yield their own CPTs and do not read
        themselves"""
        x = self.game.cpts['X']
        self.assertRaises(MechGameError, DependencyRule, 'U', [({}, x)])
        self.assertRaises(MechGameError, DependencyRule, 'X', [({'X': x}, x)])

    def test_model_checks(self):
        """declared CPTs must be candidates; decisions take no rules"""
        x = self.game.cpts['X']
        other = CPT.point('X', ('D',), (1, 1), self.doms)
        for kwargs in ({'candidates': {'X': [other]}},
                       {'dependencies': {'D': DependencyRule('D', [])}},
                       {'dependencies': {'U': DependencyRule(
                           'U', [({'D': x}, self.game.cpts['U'])])}}):
            try:
                MechanisedCausalGame(self.game, **kwargs)
            except MechGameError as e:
                self.assertEqual(e.errno, 8)
            else:
                self.fail('accepted %r' % kwargs)

    def test_candidate_parents(self):
        self.assertRaises(MechGameError, MechanisedCausalGame, self.game,
                          {'X': [bern('X', 0, self.doms)]})


def suite():
    tl = TestLoader()
    return tl.loadTestsFromModule(sys.modules[__name__])

if __name__ == '__main__':
    runner = TextTestRunner(stream=sys.stdout,descriptions=1,verbosity=2)
    runner.run(suite())
