"""Shared exception root for the package."""


class MsnError(Exception):
    """Base class for every error raised by msnrec."""
