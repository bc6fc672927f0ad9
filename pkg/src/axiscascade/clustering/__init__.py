"""
Five clustering algorithms behind one contract, `.cluster`:

- ``kmeans``: k-means++ seeding and Lloyd iterations.
- ``gmm_diag``: EM for a Gaussian mixture with diagonal covariances.
- ``dbscan``: density clustering; noise points get label ``-1``.
- ``agglomerative``: naive bottom-up merging with single, complete or average
  linkage.
- ``birch``: a CF-tree summary followed by agglomerative merging of the leaf
  subclusters.

All use the Euclidean metric. Cluster labels are arbitrary integers; callers
must not rely on a particular numbering.
"""

from axiscascade.clustering.api import (
    CLUSTER_METHODS,
    ClusterMethod,
    ClusterResult,
    cluster,
)

__all__ = ["CLUSTER_METHODS", "ClusterMethod", "ClusterResult", "cluster"]
