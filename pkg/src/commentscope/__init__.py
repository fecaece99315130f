"""Comment-thread network analysis: collection, per-author features,
relevance modelling and activity-network drawing."""

__version__ = "0.1.0"
