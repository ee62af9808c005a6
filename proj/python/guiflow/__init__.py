"""GUI-flow toolkit: graph environments, flow sampling, rewards and training.

Everything heavy lives in the native module; this package re-exports it and
adds dict-level JSON helpers on top of the string-based native ones.
"""

import json as _json

from guiflow._guiflow import *  # noqa: F401,F403
from guiflow._guiflow import (  # noqa: F401
    __version__,
    action_from_json,
    action_to_json,
    flow_from_json,
    flow_to_json,
    graph_from_json,
    graph_to_json,
    pair_from_json,
    pair_to_json,
    policy_from_json,
    policy_to_json,
    report_from_json,
    report_to_json,
    subtask_from_json,
    subtask_to_json,
    trace_from_json,
    trace_to_json,
)


def action_to_dict(action):
    return _json.loads(action_to_json(action))


def action_from_dict(data):
    return action_from_json(_json.dumps(data))


def flow_to_dict(flow):
    return _json.loads(flow_to_json(flow))


def flow_from_dict(data):
    return flow_from_json(_json.dumps(data))


def subtask_to_dict(subtask):
    return _json.loads(subtask_to_json(subtask))


def subtask_from_dict(data):
    return subtask_from_json(_json.dumps(data))


def pair_to_dict(pair):
    return _json.loads(pair_to_json(pair))


def pair_from_dict(data):
    return pair_from_json(_json.dumps(data))


def trace_to_dict(trace):
    return _json.loads(trace_to_json(trace))


def trace_from_dict(data):
    return trace_from_json(_json.dumps(data))


def report_to_dict(report):
    return _json.loads(report_to_json(report))


def report_from_dict(data):
    return report_from_json(_json.dumps(data))


def graph_to_dict(graph):
    return _json.loads(graph_to_json(graph))


def graph_from_dict(data):
    return graph_from_json(_json.dumps(data))


def policy_to_dict(policy):
    return _json.loads(policy_to_json(policy))


def policy_from_dict(data):
    return policy_from_json(_json.dumps(data))


def read_flows_jsonl(path):
    """Flows from a JSONL file, one per non-empty line."""
    flows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                flows.append(flow_from_json(line))
    return flows


def write_flows_jsonl(path, flows):
    """Flows to a JSONL file, one per line, newline terminated."""
    with open(path, "w", encoding="utf-8") as fh:
        for flow in flows:
            fh.write(flow_to_json(flow))
            fh.write("\n")
