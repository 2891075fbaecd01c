"""Exception types shared across the toolkit.

Every domain failure raises a subclass of NetmineError so callers (CLI,
server) can distinguish bad input from genuine bugs.
"""

from __future__ import annotations


class NetmineError(Exception):
    """Base class for all domain errors."""


# --- graph construction ---

class DuplicateNodeId(NetmineError):
    pass


class UnknownEndpoint(NetmineError):
    pass


class SelfLoop(NetmineError):
    pass


class UnknownNodeId(NetmineError):
    pass


class SchemaMismatch(NetmineError):
    pass


# --- clustering ---

class EmptyGraph(NetmineError):
    pass


class UnknownCluster(NetmineError):
    pass


class BadTarget(NetmineError):
    pass


class UnlabeledCluster(NetmineError):
    pass


class EmptyClusterGraph(NetmineError):
    pass


# --- null models ---

class TooFewEdges(NetmineError):
    pass


# --- statistics ---

class UnknownAttribute(NetmineError):
    pass


class NotCategoricalAttribute(NetmineError):
    pass


class NotIntegerAttribute(NetmineError):
    pass


class DegenerateGlobal(NetmineError):
    pass


class UnknownCategory(NetmineError):
    pass


# --- ingest / export ---

class ParseError(NetmineError):
    """A rejected input row. Carries the file and 1-based line number."""

    def __init__(self, path: str, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line
        self.reason = message


class MissingArtifact(NetmineError):
    pass


# --- server sessions ---

class UnknownDataset(NetmineError):
    pass


class UnknownSession(NetmineError):
    pass


class NothingToUndo(NetmineError):
    pass


class NothingToRedo(NetmineError):
    pass
