"""The shipped acceptance gate, run criterion by criterion.

Same registry as `pdmlab validate`; each criterion prints one line through
its assertion message on failure.
"""

import pytest

from pdmlab.acceptance import CRITERIA, run_one


@pytest.mark.parametrize("cid,title", [(cid, title) for cid, title, _ in CRITERIA])
def test_criterion(cid, title):
    result = run_one(cid)
    print(f"[{'PASS' if result.passed else 'FAIL'}] {cid} {title}: {result.detail}")
    assert result.passed, f"{cid} {title}: {result.detail}"
