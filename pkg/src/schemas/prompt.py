"""Schemas for rendered prompts."""

from typing import Tuple
from pydantic import BaseModel, ConfigDict, model_validator

from src.models.enums import TemplateId
from src.templates.prompt_templates import PromptTemplates


class PromptBundle(BaseModel):
    """A rendered prompt and the chunks it embeds, in order of appearance."""

    template_id: TemplateId
    question: str
    rendered: str
    embedded_chunk_ids: Tuple[str, ...]

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def validate_single_question_line(self) -> "PromptBundle":
        # chunk lines start with "- ", so a chunk quoting the question never matches
        line = "\n" + PromptTemplates.QUESTION_LINE.format(question=self.question) + "\n"
        if self.rendered.count(line) != 1:
            raise ValueError("rendered prompt must carry exactly one question line")
        return self
