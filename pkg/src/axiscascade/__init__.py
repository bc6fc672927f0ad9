"""
A two-stage ("cascade") binary text classifier built around class-centroid
relabeling, plus the experiment machinery around it.

The top-level package imports nothing heavy. Use the subpackages
and modules directly:

- `axiscascade.data`: records, line-delimited IO, stratified splits, and the
  synthetic benchmark generator.
- `axiscascade.text`: preprocessing levels and engineered feature families.
- `axiscascade.embed`: word vectors, document embeddings, cosine similarity,
  standardization, and the stage input encoder.
- `axiscascade.splitcraft`: axis embeddings, the label-2 relabel rule, the
  clustering alternative, and the two derived training sets.
- `axiscascade.clustering`: k-means, diagonal GMM, DBSCAN, agglomerative and
  Birch clustering behind one contract.
- `axiscascade.models`: the base classifier zoo and its registry.
- `axiscascade.resample`: SMOTE and Tomek-link cleaning.
- `axiscascade.cascade`: the two-stage model.
- `axiscascade.metrics`: confusion counts, P/R/F1, macro and weighted F1.
- `axiscascade.reduce`: PCA and scatter exports.
- `axiscascade.nbreg`: negative binomial regression with Wald inference.
- `axiscascade.harness` and `axiscascade.cli`: end-to-end runs, grid search,
  uncertainty sampling, corpus scoring.
"""

__version__ = "0.3.0"
