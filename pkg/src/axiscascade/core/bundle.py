"""
Serialization helpers built on |cloudpickle|_.

There are two uses:

- Bundle files. Trained models and cascades are written as a small header dict
  wrapping a cloudpickled payload, so the scoring CLI can check what it is
  loading before it unpickles anything. See `.dump_bundle` and `.load_bundle`.

- Shipping grid cells to worker processes. `.CloudpickledCall` forces
  |cloudpickle|_ for a task and its return value even when the executor itself
  uses `pickle`, so closures over prepared data work in process pools.

.. |cloudpickle| replace:: ``cloudpickle``
.. _cloudpickle: https://github.com/cloudpipe/cloudpickle
"""

import logging
import pickle
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple, Union

import cloudpickle

from axiscascade.core.errors import BundleError

__all__ = [
    "BUNDLE_FORMAT",
    "BUNDLE_VERSION",
    "CloudpickledCall",
    "OncePickledObject",
    "dump_bundle",
    "load_bundle",
]

_logger = logging.getLogger(__name__)

BUNDLE_FORMAT = "axiscascade-bundle"
BUNDLE_VERSION = 1


def dump_bundle(
    path: Union[str, Path],
    kind: str,
    payload: Any,
    provenance: Optional[Dict[str, Any]] = None,
) -> Path:
    """
    Writes ``payload`` to ``path`` as a self-describing bundle.

        >>> import tempfile, os
        >>> with tempfile.TemporaryDirectory() as tmp:
        ...     p = dump_bundle(os.path.join(tmp, "m.bundle"), "model", {"w": 1},
        ...                     provenance={"kind": "lr"})
        ...     header = load_bundle(p, expected_kind="model", header_only=True)
        ...     print(header["kind"], header["provenance"])
        model {'kind': 'lr'}

    :param kind: a short tag checked by `.load_bundle`, e.g. ``"model"`` or
        ``"cascade"``.

    :param provenance: a JSON-like dict describing how the payload was made.
    """
    path = Path(path)
    header = {
        "format": BUNDLE_FORMAT,
        "version": BUNDLE_VERSION,
        "kind": kind,
        "provenance": dict(provenance or {}),
        "payload": cloudpickle.dumps(payload, protocol=pickle.HIGHEST_PROTOCOL),
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fobj:
        pickle.dump(header, fobj, protocol=pickle.HIGHEST_PROTOCOL)
    _logger.debug("wrote %s bundle to %s", kind, path)
    return path


def load_bundle(
    path: Union[str, Path],
    expected_kind: Optional[str] = None,
    *,
    header_only: bool = False,
) -> Any:
    """
    Reads a bundle written by `.dump_bundle`.

    :param expected_kind: if given, a `.BundleError` is raised when the
        bundle's kind differs.

    :param header_only: return the header dict (with the payload still
        serialized) instead of the payload.

    :return: the unpickled payload, or the header when ``header_only``.
    """
    path = Path(path)
    try:
        with open(path, "rb") as fobj:
            header = pickle.load(fobj)
    except (OSError, pickle.UnpicklingError, EOFError) as exc:
        raise BundleError(f"cannot read bundle {str(path)!r}: {exc}") from exc
    if not isinstance(header, dict) or header.get("format") != BUNDLE_FORMAT:
        raise BundleError(f"{str(path)!r} is not an axiscascade bundle")
    if header.get("version") != BUNDLE_VERSION:
        raise BundleError(
            f"Unsupported bundle version:\n"
            f"    path:      {str(path)!r}\n"
            f"    version:   {header.get('version')!r}\n"
            f"    supported: {BUNDLE_VERSION}\n"
        )
    if expected_kind is not None and header.get("kind") != expected_kind:
        raise BundleError(
            f"Wrong bundle kind:\n"
            f"    path:     {str(path)!r}\n"
            f"    kind:     {header.get('kind')!r}\n"
            f"    expected: {expected_kind!r}\n"
        )
    if header_only:
        return header
    return cloudpickle.loads(header["payload"])


class OncePickledObject:
    """
    Wraps an arbitrary object so that it is pickled with the chosen pickler,
    while a copy of the original unwrapped object comes back at unpickling
    time.

    >>> opo = OncePickledObject([1, 2], cloudpickle.dumps, cloudpickle.loads)
    >>> pickle.loads(pickle.dumps(opo, -1))
    [1, 2]
    """

    def __init__(self, obj, dumps, loads):
        self._obj = obj
        self._dumps = dumps
        self._loads = loads

    def __reduce_ex__(self, protocol: int):
        pickled = self._dumps(self._obj, protocol=protocol)
        return self._loads, (pickled,)


class CloudpickledCall:
    """
    A nullary closure over ``func(*args, **kwargs)`` that uses |cloudpickle|_
    for itself and for its return value, whichever pickler the executor uses
    to move it between processes.

    >>> call = CloudpickledCall(lambda a, b=0: a + b, (1,), {"b": 2})
    >>> pickle.loads(pickle.dumps(call, -1))()
    3
    """

    def __init__(
        self,
        func: Callable,
        args: Tuple = (),
        kwargs: Optional[Dict] = None,
        dumps: Callable[..., bytes] = cloudpickle.dumps,
        loads: Callable[[bytes], Any] = cloudpickle.loads,
    ):
        self._func = func
        self._args = tuple(args)
        self._kwargs = dict(kwargs or {})
        self._dumps = dumps
        self._loads = loads

    def __reduce_ex__(self, protocol: int):
        # The unpickler itself must survive plain pickle.
        pickled_loads = pickle.dumps(self._loads, protocol=protocol)
        dumped = self._dumps(
            [self._func, self._args, self._kwargs, self._dumps], protocol=protocol
        )
        return type(self)._hydrate, (pickled_loads, dumped)

    @classmethod
    def _hydrate(cls, pickled_loads: bytes, dumped: bytes):
        loads = pickle.loads(pickled_loads)
        func, args, kwargs, dumps = loads(dumped)
        return cls(func, args, kwargs, dumps, loads)

    def __call__(self):
        return self._func(*self._args, **self._kwargs)

    def wrapped_call(self) -> OncePickledObject:
        """Runs the call and wraps the result for the trip back."""
        return OncePickledObject(self(), self._dumps, self._loads)
