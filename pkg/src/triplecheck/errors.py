"""Shared error types for remote backends and the encoder sidecar client."""


class TransportError(Exception):
    """Network-level failure (connect, timeout, 5xx). Retriable."""


class ProtocolError(Exception):
    """The peer answered, but not in the expected shape. Not retriable."""
