"""Desk-scale internet-radio metadata platform.

Monitors station streams for encoder metadata, resolves events against
music-library candidates with a normalized edit-distance matcher, stores
everything in a five-table corpus, and serves the search/aggregation API
behind the exploration dashboard.
"""

__version__ = "0.1.0"
