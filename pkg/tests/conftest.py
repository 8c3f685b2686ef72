import pytest


@pytest.fixture
def anyio_backend():
    return "asyncio"


@pytest.fixture(autouse=True)
def _default_seed(monkeypatch):
    # CLI tests expect the built-in seed unless they set one.
    monkeypatch.delenv("ABCMETA_SEED", raising=False)
