"""Shared fixtures: synthetic panels, origin info sets, and a fast stub
evaluator for the loop-harness tests (pure stdlib, ~30 ms per call)."""

import hashlib
import json

import numpy as np
import pytest

from combsearch import build_info, make_lambda_grid, synthetic_panel

# Directives are read back out of candidate.py by regex so the stub stays
# independent of the package under test.
STUB_EVALUATOR = '''\
import os
import re
import sys
import time

path = os.environ.get("COMBSEARCH_CANDIDATE", "candidate.py")
text = open(path, encoding="utf-8").read()
mode = re.search(r'^MODE = "(\\w+)"$', text, re.M)
if mode and mode.group(1) == "crash":
    sys.stderr.write("candidate asked to crash\\n")
    sys.exit(7)
if mode and mode.group(1) == "hang":
    time.sleep(60)
score = float(re.search(r"^SCORE = ([0-9.eE+-]+)$", text, re.M).group(1))
print("---")
print("method: stub")
print("rmse: {:.10f}".format(score))
print("benchmark_rmse: {:.10f}".format(1.0))
print("relative_rmse: {:.10f}".format(score))
'''


def cand(score):
    """Candidate text the stub evaluator scores at exactly ``score``."""
    return f"# candidate\nSCORE = {score!r}\n"


def crash_cand(note="boom"):
    return f'# {note}\nMODE = "crash"\nSCORE = 0.0\n'


def hang_cand():
    return '# slow\nMODE = "hang"\nSCORE = 0.0\n'


def state_fingerprint(workdir):
    """Byte-level digest of every file in a run directory.

    run.json is compared structurally with its creation timestamp dropped;
    everything else by sha256 of the raw bytes.
    """
    out = {}
    for p in sorted(workdir.rglob("*")):
        if p.is_dir():
            continue
        rel = p.relative_to(workdir).as_posix()
        if rel == "run.json":
            meta = json.loads(p.read_text(encoding="utf-8"))
            meta.pop("created_utc", None)
            out[rel] = json.dumps(meta, sort_keys=True)
        else:
            out[rel] = hashlib.sha256(p.read_bytes()).hexdigest()
    return out


@pytest.fixture(scope="session")
def panel48():
    return synthetic_panel()


@pytest.fixture(scope="session")
def short_grid():
    # 60 points over e^8..e^-8: plenty of resolution, far cheaper than the
    # production 200-point grid.
    return make_lambda_grid(60, 8.0, -8.0)


@pytest.fixture(scope="session")
def info_mid(panel48, short_grid):
    """Mid-sample origin with a full 20-row training window."""
    return build_info(panel48, t=30, w=20, grid=short_grid)


@pytest.fixture(scope="session")
def info_small(short_grid):
    """Small panel origin (K=5) for the slower run3-family tests."""
    panel = synthetic_panel(T=26, K=5, seed=3)
    return build_info(panel, t=22, w=20, grid=short_grid)
