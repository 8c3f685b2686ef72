from __future__ import annotations

import contextlib
import functools
import math
import sys
from collections.abc import AsyncIterator
from typing import TextIO

import anyio
from anyio.streams.memory import MemoryObjectReceiveStream
from tqdm import tqdm

from ._engine import Progress, ProgressCallback

# Minimum seconds between terminal refreshes.
REFRESH_INTERVAL = 0.1


async def render_progress(
    events: MemoryObjectReceiveStream[Progress],
    total: int,
    *,
    desc: str,
    unit: str = "sim",
    quiet: bool = False,
    file: TextIO | None = None,
) -> None:
    """Draws a progress bar from engine events until the stream is closed.

    The bar is disabled with quiet=True and when `file` is not a terminal.
    """
    with tqdm(
        total=total,
        desc=desc,
        unit=unit,
        mininterval=REFRESH_INTERVAL,
        # None lets tqdm switch itself off for non-terminals.
        disable=True if quiet else None,
        file=file or sys.stderr,
        leave=False,
    ) as bar:
        async with events:
            async for event in events:
                # Events can arrive out of order; never move the bar backwards.
                if event.done > bar.n:
                    bar.update(event.done - bar.n)
                if event.family is not None:
                    bar.set_postfix_str(event.family.value, refresh=False)


@contextlib.asynccontextmanager
async def progress_display(
    total: int,
    *,
    desc: str,
    unit: str = "sim",
    quiet: bool = False,
    file: TextIO | None = None,
) -> AsyncIterator[ProgressCallback]:
    """Yields a progress callback feeding a renderer task.

    The callback only queues the event, so it is safe to call from the engine
    loop; all terminal output happens in the renderer task.
    """
    send, receive = anyio.create_memory_object_stream(math.inf)
    async with anyio.create_task_group() as tg:
        tg.start_soon(
            functools.partial(
                render_progress,
                receive,
                total,
                desc=desc,
                unit=unit,
                quiet=quiet,
                file=file,
            )
        )
        async with send:
            yield send.send_nowait
