"""lagoontwin: a desk-scale digital twin for a coastal lagoon.

Subpackages:

- ``core``: shared domain types, dataset catalog, evaluation metrics
- ``store``: 7-day window store + compacted historical columnar store
- ``ingest``: source adapters, scheduler, synthetic generator, fixture replay
- ``context``: NGSI-LD-subset entity store with temporal history and geo queries
- ``features``: imputation, lag matrices, chronological splits, robust scaling
- ``learners``: gradient-boosted trees, recursive/direct forecasting, backtesting
- ``runoff``: LSTM run-off model and what-if scenario engine
- ``service``: FastAPI application tier
"""

__version__ = "0.1.0"
