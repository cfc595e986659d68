# common/errors.py
"""
Exception hierarchy. The CLI maps each family to an exit code:
  ConfigError -> 1, DataError -> 2, RemoteError (and IO) -> 3.
"""
from __future__ import annotations
from typing import Optional


class HciError(Exception):
    """Base for every error raised by this package."""


class ConfigError(HciError):
    """Invalid configuration or usage."""


class DataError(HciError):
    """Input data violates a contract."""


class DatasetError(DataError):
    def __init__(self, reason: str, line: Optional[int] = None, path: str = ""):
        self.reason = reason
        self.line = line
        self.path = path
        where = f"{path}:{line}" if line is not None else path
        super().__init__(f"{where}: {reason}" if where else reason)


class ValidationError(DataError):
    pass


class ShapeError(DataError):
    """Feature width or label matrix shape mismatch."""


class EmbeddingError(DataError):
    pass


class FingerprintError(DataError):
    pass


class ReferenceMismatchError(DataError):
    """Reference table key cannot match any grid configuration."""


class RemoteError(HciError):
    """GitHub API failures."""


class RepoNotFoundError(RemoteError):
    pass


class AuthError(RemoteError):
    pass


class RateLimitError(RemoteError):
    pass
