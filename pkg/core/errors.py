"""
================================================================================
DESCRIPTIVE KEYPHRASES — Error Types
================================================================================
Every data problem raised by the pipeline derives from KeyphraseError and
may carry the name of the pipeline stage it happened in, so the runner can
print stage-tagged messages.
================================================================================
"""

from typing import Optional


class KeyphraseError(Exception):
    """Base class for all pipeline errors"""

    default_stage = "pipeline"

    def __init__(self, message: str, stage: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.stage = stage or self.default_stage

    def with_stage(self, stage: str) -> "KeyphraseError":
        """Re-tag the error with the stage that surfaced it"""
        self.stage = stage
        return self

    def __str__(self) -> str:
        return f"[{self.stage}] {self.message}"


class ConfigError(KeyphraseError):
    default_stage = "config"


class CorpusError(KeyphraseError):
    default_stage = "corpus"


class AnnotationError(KeyphraseError):
    default_stage = "annotations"


class CandidateError(KeyphraseError):
    default_stage = "candidates"


class SamplingError(CandidateError):
    default_stage = "sampling"


class IndexFormatError(KeyphraseError):
    default_stage = "index"


class FeatureError(KeyphraseError):
    default_stage = "features"


class ModelError(KeyphraseError):
    default_stage = "model"


class EvaluationError(KeyphraseError):
    default_stage = "eval"


class AnalysisError(KeyphraseError):
    default_stage = "analysis"


class ProvenanceError(KeyphraseError):
    default_stage = "provenance"


class ArtifactError(KeyphraseError):
    default_stage = "artifacts"
