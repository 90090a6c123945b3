"""Cork extraction and certification for 5-dimensional h-cobordisms.

Works entirely at the level of chain complexes and group presentations:
integer boundary matrices, free-group words, and replayable move logs.
"""

__version__ = "0.1.0"
