"""
Executors used to run independent grid cells.

`.executor_ctx` is a small factory over a registry of named backends:

- ``"inline"``: `.InlineExecutor`, serial, task exceptions captured in futures.
- ``"nocatch"``: `.NoCatchExecutor`, serial, task exceptions raised at submit
  time so a debugger stops where the failure happens.
- ``"thread"``: `concurrent.futures.ThreadPoolExecutor`.
- ``"cpprocess"``: `.CloudpickleProcessPoolExecutor`, a process pool that moves
  tasks and results with |cloudpickle|_.

Passing ``max_workers=0`` without a backend name picks the default serial
backend (``"inline"``); any other count picks the default concurrent one
(``"cpprocess"``). ``max_workers=None`` means one worker per available core.

>>> with executor_ctx("inline") as exe:
...     print(exe.submit(pow, 2, 5).result())
32

.. |cloudpickle| replace:: ``cloudpickle``
.. _cloudpickle: https://github.com/cloudpipe/cloudpickle
"""

import logging
from concurrent.futures import Executor, Future, ProcessPoolExecutor, ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, Optional, Tuple, TypeVar

from axiscascade.core.bundle import CloudpickledCall
from axiscascade.core.errors import ConfigError
from axiscascade.core.sys import get_num_available_cores

__all__ = [
    "BackendEntryPoint",
    "CloudpickleProcessPoolExecutor",
    "InlineExecutor",
    "NoCatchExecutor",
    "executor_ctx",
    "get_backend",
    "register_backend",
]

_logger = logging.getLogger(__name__)

# Represents the generic return type of a submitted callable.
Ret = TypeVar("Ret")


class InlineExecutor(Executor):
    """
    Evaluates each task immediately upon submission, trapping exceptions in
    the returned future like normal executors do.

    >>> with InlineExecutor() as exe:
    ...     fut = exe.submit(int, "x")
    >>> type(fut.exception()).__name__
    'ValueError'
    """

    def __init__(self):
        self._closing = False

    def submit(self, fcn: Callable[..., Ret], /, *args, **kwargs) -> Future:
        if self._closing:
            raise RuntimeError(
                "Submissions are not allowed to an executor that is shutting down."
            )
        fut: Future = Future()
        try:
            result = fcn(*args, **kwargs)
        except BaseException as exc:
            fut.set_exception(exc)
        else:
            fut.set_result(result)
        return fut

    def shutdown(self, *args, **kwargs):
        self._closing = True
        super().shutdown(*args, **kwargs)


class NoCatchExecutor(InlineExecutor):
    """
    Like `.InlineExecutor`, but exceptions propagate out of `submit` instead
    of being stored in the future.

    >>> with NoCatchExecutor() as exe:
    ...     exe.submit(int, "x")
    Traceback (most recent call last):
    ...
    ValueError: invalid literal for int() with base 10: 'x'
    """

    def submit(self, fcn: Callable[..., Ret], /, *args, **kwargs) -> Future:
        if self._closing:
            raise RuntimeError(
                "Submissions are not allowed to an executor that is shutting down."
            )
        result = fcn(*args, **kwargs)
        fut: Future = Future()
        fut.set_result(result)
        return fut


def _call_cloudpickled(call: CloudpickledCall):
    return call.wrapped_call()


class CloudpickleProcessPoolExecutor(ProcessPoolExecutor):
    """
    A drop-in replacement for `~concurrent.futures.ProcessPoolExecutor` that
    uses |cloudpickle|_ for tasks and their return values, so lambdas and
    closures over prepared data can be submitted.

    >>> with CloudpickleProcessPoolExecutor(1) as exe:
    ...     print(exe.submit(lambda: 123).result())
    123
    """

    def submit(self, fcn, /, *args, **kwargs):
        return super().submit(_call_cloudpickled, CloudpickledCall(fcn, args, kwargs))


@dataclass(frozen=True)
class BackendEntryPoint:
    """
    Describes one executor backend: how to build it and whether it runs tasks
    serially or concurrently.
    """

    factory: Callable[[Optional[int]], Executor]
    supports_serial: bool
    supports_concurrent: bool


_BACKENDS: Dict[str, BackendEntryPoint] = {}
_DEFAULT_SERIAL_BACKEND = "inline"
_DEFAULT_CONCURRENT_BACKEND = "cpprocess"


def register_backend(name: str, entry_point: BackendEntryPoint) -> None:
    """
    Registers a new or replacement backend under ``name``.
    """
    if not (entry_point.supports_serial or entry_point.supports_concurrent):
        raise RuntimeError(
            f"The backend for {name} must support at least one mode "
            f"(serial and/or concurrent)."
        )
    _BACKENDS[name] = entry_point


def get_backend(
    name: Optional[str] = None, max_workers: Optional[int] = None
) -> Tuple[str, Optional[int], BackendEntryPoint]:
    """
    Resolves a backend name and worker count.

    >>> get_backend(max_workers=0)[:2]
    ('inline', 0)
    >>> get_backend(max_workers=2)[:2]
    ('cpprocess', 2)
    >>> get_backend("inline", 4)[:2]
    ('inline', 0)
    >>> get_backend("warp-drive")
    Traceback (most recent call last):
    ...
    axiscascade.core.errors.ConfigError: Unknown executor backend: 'warp-drive'...
    """
    if name is None:
        name = (
            _DEFAULT_SERIAL_BACKEND if max_workers == 0 else _DEFAULT_CONCURRENT_BACKEND
        )
    try:
        entry_point = _BACKENDS[name]
    except KeyError:
        raise ConfigError(
            f"Unknown executor backend: {name!r}\n"
            f"    known backends: {sorted(_BACKENDS)}"
        ) from None
    if not entry_point.supports_concurrent:
        max_workers = 0
    elif max_workers == 0 and not entry_point.supports_serial:
        # Concurrent-only backends cannot run with zero workers.
        max_workers = 1
    elif max_workers is None:
        max_workers = get_num_available_cores()
    return name, max_workers, entry_point


@contextmanager
def executor_ctx(
    backend: Optional[str] = None, max_workers: Optional[int] = None
) -> Iterator[Executor]:
    """
    Creates the requested executor, yields it, and shuts it down on exit,
    waiting for pending work.
    """
    name, max_workers, entry_point = get_backend(backend, max_workers)
    _logger.debug("starting %s executor with max_workers=%s", name, max_workers)
    exe = entry_point.factory(max_workers)
    with exe:
        yield exe


register_backend("inline", BackendEntryPoint(lambda _: InlineExecutor(), True, False))
register_backend(
    "nocatch", BackendEntryPoint(lambda _: NoCatchExecutor(), True, False)
)
register_backend("thread", BackendEntryPoint(ThreadPoolExecutor, False, True))
register_backend(
    "cpprocess", BackendEntryPoint(CloudpickleProcessPoolExecutor, False, True)
)
