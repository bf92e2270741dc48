"""Enums shared across the pipeline."""

from enum import Enum


class FormatFlag(str, Enum):
    """Formatting traits detected on a chunk."""
    BULLETED = "BULLETED"
    ORG_FORMATTED = "ORG_FORMATTED"  # matched an organisation-specific pattern


class PriorKind(str, Enum):
    """Metadata priors that can be composed into a chunk prior."""
    PAGE = "PAGE"
    SOURCE = "SOURCE"
    FORMAT = "FORMAT"

    @classmethod
    def ordered(cls):
        """Stable evaluation order for composition."""
        return [cls.PAGE, cls.SOURCE, cls.FORMAT]


class TemplateId(str, Enum):
    """Prompt shapes rendered by the prompt kit."""
    BASELINE = "BASELINE"
    INPROMPT_BAYES = "INPROMPT_BAYES"
    SCORED = "SCORED"

    @classmethod
    def get_all_values(cls):
        """Get all template ids as list."""
        return [template.value for template in cls]


class RunMode(str, Enum):
    """Offline deterministic run or live LLM run."""
    MOCK = "MOCK"
    LLM = "LLM"

    @classmethod
    def get_all_values(cls):
        """Get all run modes as list."""
        return [mode.value for mode in cls]


class ProviderKind(str, Enum):
    """Chat completion backends."""
    OPENAI = "openai"
    MOCK = "mock"


class GradeLabel(str, Enum):
    """Labels the likelihood grader may answer with."""
    HIGH = "HIGH"
    MEDIUM = "MEDIUM"
    LOW = "LOW"

    @property
    def likelihood(self) -> float:
        """Numeric likelihood for the label."""
        return {"HIGH": 0.8, "MEDIUM": 0.5, "LOW": 0.2}[self.value]
