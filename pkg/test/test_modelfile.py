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

"""modelfile.py tests"""

import sys
import json

from base_test_code import *

from mechgame.core import MechGameError
from mechgame.modelfile import parse_model, serialise_model, model_to_dict
from mechgame.modelfile import fixture_path, list_fixtures, load_model

def chain(**changes):
    """A two variable decision problem as a dict, with `changes` merged
    into its second variable."""
    u = {"name": "U", "domain": ["0", "1"], "parents": ["D"],
         "kind": "utility", "agent": "a",
         "cpt": [[1, 0], [0, 1]], "utility": {"0": 0, "1": 1}}
    u.update(changes)
    return {"variables": [
        {"name": "D", "domain": ["0", "1"], "kind": "decision", "agent": "a"},
        u]}

def text(doc):
    return json.dumps(doc)


class ParseTests(TestCase):
    def test_minimal(self):
        model = parse_model(text(chain()))
        self.assertEqual(model.game.decisions, ('D',))
        self.assertEqual(model.game.agents, ('a',))
        self.assertEqual(model.game.utility_value['U'], (0, 1))
        self.assertFalse(model.is_restricted())

    def test_decimals(self):
        """decimal numbers are read exactly"""
        model = parse_model(text(chain(cpt=[[0.25, 0.75], ["1/2", "0.5"]])))
        self.assertEqual(model.game.cpts['U'].rows[0], (F('1/4'), F('3/4')))

    def test_bytes(self):
        model = parse_model(text(chain()).encode('utf-8'))
        self.assertEqual(len(model.variables), 2)

    def assertLocated(self, doc, location, reason=None):
        try:
            parse_model(doc if isinstance(doc, (str, bytes)) else text(doc))
        except MechGameError as e:
            self.assertEqual(e.errno, 10)
            self.assertEqual(e.location, location)
            if reason is not None:
                self.assertEqual(e.reason, reason)
        else:
            self.fail('accepted, expected error at %s' % location)

    def test_schema_errors(self):
        """structural problems name their document path"""
        doc = chain()
        doc['colour'] = 'blue'
        self.assertLocated(doc, 'colour')
        self.assertLocated(chain(kind='reward'), 'variables.1.kind')
        self.assertLocated(chain(cpt=[[1, 0], ["half", "1/2"]]),
                           'variables.1.cpt.1.0')
        self.assertLocated(chain(cpt=[[1, 0], [0, None]]),
                           'variables.1.cpt.1.1')

    def test_semantic_errors(self):
        """semantic problems name their document path too"""
        self.assertLocated(chain(parents=["Q"]), 'variables.1.parents.0')
        self.assertLocated(chain(name="M_U"), 'variables.1.name')
        self.assertLocated(chain(name="D"), 'variables.1.name')
        self.assertLocated(chain(cpt=[[1, 0], ["1/2", "1/3"]]),
                           'variables.1.cpt', 3)
        self.assertLocated(chain(utility={"0": 0}), 'variables.1.utility')
        self.assertLocated(chain(utility={"0": 0, "1": 1, "2": 2}),
                           'variables.1.utility.2')
        doc = chain()
        doc['variables'][0]['cpt'] = [[1, 0]]
        self.assertLocated(doc, 'variables.0.cpt')
        doc = chain()
        doc['variables'][0]['parents'] = ['U']
        self.assertLocated(doc, 'variables', 7)

    def test_mechanism_errors(self):
        doc = chain()
        doc['mechanisms'] = {'candidates': {'Q': [[[1, 0]]]}}
        self.assertLocated(doc, 'mechanisms.candidates.Q')
        doc['mechanisms'] = {'candidates': {'U': [[[1, 0]]]}}
        self.assertLocated(doc, 'mechanisms.candidates.U.0', 4)

    def test_json_errors(self):
        """invalid JSON is located by line and column"""
        try:
            parse_model('{"variables": [\n  {"name": }')
        except MechGameError as e:
            self.assertEqual(e.errno, 10)
            self.assertTrue(e.location.startswith('line 2 column'))
        else:
            self.fail()
        self.assertRaises(MechGameError, parse_model, b'\xff\xfe')


class SerialiseTests(TestCase):
    def test_canonical(self):
        """serialised fixtures parse back to the same text"""
        for name in list_fixtures():
            once = serialise_model(fixture_model(name))
            self.assertEqual(serialise_model(parse_model(once)), once, name)

    def test_shape(self):
        doc = model_to_dict(fixture_model('mouse'))
        self.assertEqual(doc['metadata']['name'], 'mouse')
        self.assertEqual([v['name'] for v in doc['variables']],
                         ['D', 'U', 'X'])
        self.assertEqual(doc['variables'][2]['cpt'],
                         [['3/4', '1/4'], ['1/4', '3/4']])
        self.assertFalse('mechanisms' in doc)
        doc = model_to_dict(fixture_model('recommender'))
        self.assertEqual(sorted(doc['mechanisms']),
                         ['candidates', 'dependencies'])


class FixtureTests(TestCase):
    def test_list(self):
        names = list_fixtures()
        for name in ['mouse', 'recommender', 'actor_critic', 'mamdp', 'zero',
                     'cirl', 'ndu', 'thermometer_btc', 'thermometer_tc',
                     'thermometer_bt']:
            self.assertTrue(name in names, name)

    def test_paths(self):
        """bare names, fixture-relative paths and file names all resolve"""
        path = fixture_path('mouse')
        self.assertTrue(path.endswith('mouse.json'))
        self.assertEqual(fixture_path('fixtures/mouse'), path)
        self.assertEqual(fixture_path('mouse.json'), path)
        self.assertEqual(fixture_path('no_such_game'), None)

    def test_load(self):
        model = load_model('mouse')
        self.assertEqual(model.name, 'mouse')
        self.assertEqual(model.game.owners['U'], ('mouse',))
        try:
            load_model('no_such_game')
        except MechGameError as e:
            self.assertEqual(e.errno, 10)
        else:
            self.fail()

    def test_shared_utility(self):
        """a utility may belong to several agents"""
        game = fixture_model('cirl').game
        self.assertEqual(game.owners['U'], ('human', 'robot'))


def suite():
    tl = TestLoader()
    return tl.loadTestsFromModule(sys.modules[__name__])

if __name__ == '__main__':
    runner = TextTestRunner(stream=sys.stdout,descriptions=1,verbosity=2)
    runner.run(suite())
