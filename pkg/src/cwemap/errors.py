"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: usage errors exit 1, data errors exit 2,
upstream/service errors exit 3.
"""


class CwemapError(Exception):
    """Base class for all toolkit errors."""


class DataError(CwemapError):
    """Malformed or inconsistent input data (exit code 2)."""


class ServiceError(CwemapError):
    """Failure of an upstream service or sidecar (exit code 3)."""


class LabelError(DataError):
    """Invalid label grammar string or chain."""


class CatalogError(DataError):
    """Catalog file violates the Top-25 shape."""


class DatasetError(DataError):
    """Dataset file is malformed (duplicate ids, bad labels, bad header)."""


class FeedError(DataError):
    """Feed document cannot be parsed."""


class EmbeddingStoreError(DataError):
    """Embedding store is missing vectors or has inconsistent dimensions."""


class ScorerProtocolError(ServiceError):
    """External scorer endpoint violated the wire protocol."""


class WorkflowError(CwemapError):
    """Annotation workflow violation."""


class WrongActorError(WorkflowError):
    """Decision submitted by an annotator who is not the expected actor."""


class StaleVersionError(WorkflowError):
    """Decision carried an outdated task version."""
