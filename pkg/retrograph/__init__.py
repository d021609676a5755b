"""retrograph: retroactive dynamic graph data structures."""

__version__ = "0.1.0"
