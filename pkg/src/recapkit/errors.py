"""Exception hierarchy shared across the pipeline."""


class RecapError(Exception):
    """Base class for all recapkit errors."""


class ContextOverflow(RecapError):
    """Conditioning context exceeds the provider's token cap."""


class EndpointError(RecapError):
    """Remote endpoint failed after exhausting retries."""


class GenerationEmpty(RecapError):
    """The model returned zero tokens; the caller decides the fallback."""


class NoKeyTokens(RecapError):
    """No position scored a positive long-short gap."""


class EmptyRemotePrefix(RecapError):
    """A key token has no remote prefix to draw candidate segments from."""


class NoImprovingSegment(RecapError):
    """No candidate segment beats the short-context baseline."""


class CompactionDiverged(RecapError):
    """A compaction summary came back no shorter than the text it replaces."""


class TaggedInputError(RecapError):
    """An input document already contains recap tag literals."""
