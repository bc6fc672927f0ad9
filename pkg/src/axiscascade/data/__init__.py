"""
Record types, dataset IO, stratified splitting, and synthetic benchmarks.
"""

from axiscascade.data.dataset import (
    Dataset,
    Document,
    Meta,
    SplitPair,
    load_jsonl,
    save_jsonl,
    stratified_split,
)
from axiscascade.data.synth import SynthSpec, synth_generate

__all__ = [
    "Dataset",
    "Document",
    "Meta",
    "SplitPair",
    "SynthSpec",
    "load_jsonl",
    "save_jsonl",
    "stratified_split",
    "synth_generate",
]
