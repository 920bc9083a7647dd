"""Exception hierarchy shared by all fcarepo modules."""
from __future__ import annotations


class FcaRepoError(Exception):
    """Base class for all errors raised by fcarepo."""


class ContextError(FcaRepoError, ValueError):
    """A formal context violates its invariants (duplicate names, bad shape)."""


class ParseError(FcaRepoError, ValueError):
    """Input could not be parsed; ``diagnostics`` holds the details, first error first."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__(str(self.diagnostics[0]) if self.diagnostics else "parse error")


class MetadataError(FcaRepoError, ValueError):
    """The metadata index is malformed or violates a mandatory rule."""

    def __init__(self, messages):
        if isinstance(messages, str):
            messages = [messages]
        self.messages = list(messages)
        super().__init__("; ".join(self.messages))


class BudgetExceeded(FcaRepoError, RuntimeError):
    """Enumeration produced more results than the configured budget allows."""

    def __init__(self, budget: int, what: str = "concepts"):
        self.budget = budget
        super().__init__(f"more than {budget} {what}; raise the budget to continue")


class RepoError(FcaRepoError):
    """Remote repository access failed."""


class NetworkError(RepoError):
    pass


class HTTPStatusError(RepoError):
    def __init__(self, status: int, url: str):
        self.status = status
        self.url = url
        super().__init__(f"HTTP {status} for {url}")


class ContextNotFound(HTTPStatusError):
    def __init__(self, name: str, url: str, suggestions=()):
        self.name = name
        self.suggestions = list(suggestions)
        RepoError.__init__(self, self._message(name, self.suggestions))
        self.status = 404
        self.url = url

    @staticmethod
    def _message(name, suggestions):
        msg = f"context not found: {name}"
        if suggestions:
            msg += "; did you mean: " + ", ".join(suggestions)
        return msg


class OfflineError(RepoError):
    """Offline mode was requested but the cache cannot answer."""
