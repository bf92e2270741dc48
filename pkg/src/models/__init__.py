"""Models initialization."""

from .enums import FormatFlag, GradeLabel, PriorKind, ProviderKind, RunMode, TemplateId

__all__ = ["FormatFlag", "GradeLabel", "PriorKind", "ProviderKind", "RunMode", "TemplateId"]
