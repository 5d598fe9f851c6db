"""Find inputs on which plausible implementations of a function disagree."""

import json as _json

from . import _core
from ._core import EmptySpaceError, MiniFnTypeError, ParseError, SpecError, evaluate, format_source

__all__ = ["EmptySpaceError", "MiniFnTypeError", "ParseError", "SpecError", "bench", "evaluate",
           "format_source", "render", "run"]


def _config(config):
    return _json.dumps(config or {})


def run(spec, corpus, config=None):
    """Report for `spec` (.fnspec text) over the .mfn files in `corpus`, as a dict."""
    return _json.loads(_core.run(spec, str(corpus), _config(config)))


def render(spec, corpus, config=None):
    """The same run rendered as partial examples with ??? placeholders."""
    return _core.render(spec, str(corpus), _config(config))


def bench(dataset, k=5, config=None):
    return _json.loads(_core.bench(str(dataset), k, _config(config)))
