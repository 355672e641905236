"""Python access to the evkws core: filtration, graph building, quantized
inference, metrics and the hardware latency model."""

import json as _json

from ._evkws import *  # noqa: F401,F403
from ._evkws import evaluate_json as _evaluate_json
from ._evkws import simulate_json as _simulate_json
from ._evkws import stats_json as _stats_json


def stats(streams, window_us=10000):
    return _json.loads(_stats_json(list(streams), window_us))


def evaluate(records, ks=(1, 3)):
    return _json.loads(_evaluate_json(list(records), list(ks)))


def simulate(events, params=None):
    """events: iterable of (t_us, edge_count) pairs."""
    return _json.loads(_simulate_json(list(events), params if params is not None else HwParams()))
