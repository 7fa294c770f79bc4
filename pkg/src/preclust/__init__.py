"""preclust: cluster-label feature enrichment for sensor-based fault
classification.

The library covers the whole workflow: synthetic or CSV sensor ingestion,
preprocessing (row cleanup, correlation pruning, ANOVA selection,
standardization), density/centroid clustering with epsilon and k tuning,
external validation against a normal-operating-condition schedule, cluster
label feature enrichment with SMOTE balancing, and a paired significance
comparison of six classifier families with and without the enrichment.
"""

__version__ = "0.1.0"

from .core import (
    ALGORITHM_ORDER,
    Algorithm,
    ClusterAssignment,
    LabelVector,
    NocSchedule,
    RunSeed,
    SensorFrame,
)

__all__ = [
    "ALGORITHM_ORDER",
    "Algorithm",
    "ClusterAssignment",
    "LabelVector",
    "NocSchedule",
    "RunSeed",
    "SensorFrame",
    "__version__",
]
