"""
System-level utilities for the `axiscascade` package: core counting, content
hashing, and seed derivation.
"""

import hashlib
import multiprocessing
from pathlib import Path
from typing import Optional, Union

import psutil

LOGICAL_CORES = psutil.cpu_count(logical=True)
PHYSICAL_CORES = psutil.cpu_count(logical=False)  # None on some platforms


def get_num_available_cores(pid: Optional[int] = None, physical: bool = False) -> int:
    """
    Returns the number of cores that are available to the given process for
    scheduling work, respecting the CPU affinity mask when possible. Grid
    searches use this as their default worker count.

    >>> get_num_available_cores() >= 1
    True

    :param pid: process ID to test, on systems that have affinity masks.
        Defaults to the current process.

    :param physical: whether to try only counting physical cores. Silently
        ignored on platforms that cannot report them.
    """
    if hasattr(psutil.Process, "cpu_affinity"):
        proc = psutil.Process(pid)
        logical_available = len(proc.cpu_affinity())
        if physical and (PHYSICAL_CORES is not None) and (PHYSICAL_CORES >= 0):
            return max(1, int((PHYSICAL_CORES * logical_available) // LOGICAL_CORES))
        return logical_available
    else:
        # macOS has no affinity masks.
        return multiprocessing.cpu_count()


def sha256_file(path: Union[str, Path], chunk_size: int = 1 << 20) -> str:
    """
    Returns the hex SHA-256 digest of a file's contents. Used for run
    provenance.
    """
    digest = hashlib.sha256()
    with open(path, "rb") as fobj:
        for chunk in iter(lambda: fobj.read(chunk_size), b""):
            digest.update(chunk)
    return digest.hexdigest()


def derive_seed(base_seed: int, index: int) -> int:
    """
    Returns the seed for the ``index``-th run of a grid: ``base_seed`` XOR
    ``index``.

    >>> derive_seed(13, 0)
    13
    >>> derive_seed(13, 1)
    12
    """
    return int(base_seed) ^ int(index)
