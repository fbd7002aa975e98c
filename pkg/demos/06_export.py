"""
Exporting models
================

Models, action models and complexes serialize to JSON and render as DOT, with
one edge color per agent.
"""

from epistemia import input_model, mp0
from epistemia.serialize import dumps, model_to_dot, model_to_json

print(dumps(model_to_json(input_model(2))))
print(model_to_dot(mp0(2).frame, "mp0"))
