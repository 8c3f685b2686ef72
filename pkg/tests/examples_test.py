#!/usr/bin/env python3

import importlib
import sys

import abcmeta
import pytest


@pytest.mark.anyio
async def test_worked_example(capsys):
    worked = importlib.import_module("abcmeta.examples.worked.__main__")
    results = await worked.main(iters=2000)
    assert len(results) == 4
    assert results[0].family is abcmeta.Family.NORMAL
    assert results[1].family is abcmeta.Family.BETA
    assert results[2].selection_probability is not None
    assert results[3].selection_probability is not None
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 4
    assert all(line.startswith("[ABC Mean=") for line in lines)
    assert "[Distribution=" in lines[2]


if __name__ == "__main__":
    pytest.main(sys.argv)
