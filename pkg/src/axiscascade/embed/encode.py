"""
The encoder that turns records into classifier inputs: the record embedding
followed by standardized engineered features. It is fitted on the training
split and serialized with every model bundle, so scoring applies exactly the
same preprocessing, vocabulary and scaling.
"""

import logging
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from axiscascade.core.errors import (
    ConfigError,
    DimensionMismatchError,
    MissingEmbeddingError,
)
from axiscascade.data.dataset import Dataset
from axiscascade.embed.scale import Scaler, standardize_apply, standardize_fit
from axiscascade.text.features import FeatureConfig, FeaturePipeline
from axiscascade.text.prep import PrepLevel, PrepResources, preprocess

__all__ = ["InputEncoder", "tokenize_dataset"]

_logger = logging.getLogger(__name__)


def tokenize_dataset(
    ds: Dataset, level: Union[PrepLevel, str], res: PrepResources
) -> Dict[str, List[str]]:
    """Preprocesses every record's text, keyed by id."""
    return {doc.id: preprocess(doc.text, level, res) for doc in ds}


class InputEncoder:
    """
    Builds ``embedding ⊕ standardized features`` rows.

    :param features: the feature configuration, or `None` for embedding-only
        inputs.

    :param use_embedding: whether the record embedding leads each row.
    """

    def __init__(
        self,
        res: PrepResources,
        level: Union[PrepLevel, str] = PrepLevel.L3,
        features: Optional[FeatureConfig] = None,
        use_embedding: bool = True,
    ):
        if features is None and not use_embedding:
            raise ConfigError("inputs need the embedding, engineered features, or both")
        self.res = res
        self.level = PrepLevel.get(level)
        self.features = features
        self.use_embedding = use_embedding
        self.pipeline: Optional[FeaturePipeline] = None
        self.scaler: Optional[Scaler] = None
        self.embedding_dim: Optional[int] = None

    @property
    def is_fitted(self) -> bool:
        return self.embedding_dim is not None or self.pipeline is not None

    @property
    def feature_names(self) -> Tuple[str, ...]:
        names: Tuple[str, ...] = ()
        if self.use_embedding:
            names += tuple(f"emb_{i}" for i in range(self.embedding_dim or 0))
        if self.pipeline is not None:
            names += self.pipeline.names
        return names

    @property
    def input_dim(self) -> int:
        return len(self.feature_names)

    def fit(self, train: Dataset) -> "InputEncoder":
        if self.use_embedding:
            if train.dim is None:
                raise MissingEmbeddingError("training records carry no embeddings")
            self.embedding_dim = train.dim
        if self.features is not None:
            tokens = tokenize_dataset(train, self.level, self.res)
            self.pipeline = FeaturePipeline(self.res, self.features).fit(train, tokens)
            raw = self.pipeline.transform(train, tokens)
            if raw.shape[1]:
                self.scaler = standardize_fit(raw)
        _logger.info("input encoder fitted: %d columns", self.input_dim)
        return self

    def transform(self, ds: Dataset) -> np.ndarray:
        blocks = []
        if self.use_embedding:
            if len(ds) and ds.dim is not None and ds.dim != self.embedding_dim:
                raise DimensionMismatchError(
                    f"records have embedding dim {ds.dim}, encoder expects "
                    f"{self.embedding_dim}"
                )
            emb = ds.embedding_matrix()
            blocks.append(emb.reshape(len(ds), self.embedding_dim))
        if self.pipeline is not None:
            tokens = tokenize_dataset(ds, self.level, self.res)
            raw = self.pipeline.transform(ds, tokens)
            if self.scaler is not None:
                raw = standardize_apply(self.scaler, raw)
            blocks.append(raw)
        return np.hstack(blocks) if blocks else np.zeros((len(ds), 0))
