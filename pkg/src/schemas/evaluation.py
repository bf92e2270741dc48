"""Schemas for the answer-quality evaluation harness."""

from typing import Dict, List, Optional
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.models.enums import RunMode, TemplateId
from src.schemas.corpus import Chunk
from src.templates.prompt_templates import GRADING_TEMPLATE_VERSION, JUDGE_TEMPLATE_VERSION


class EvalCase(BaseModel):
    """A question with one gold-bearing chunk and conflicting evidence."""

    case_id: str
    question: str
    gold_fact: str
    chunks: List[Chunk]
    hard: bool = False
    # Pre-graded likelihoods by chunk_id; when set they replace grading.
    likelihoods: Optional[Dict[str, float]] = None

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def validate_gold_chunk(self) -> "EvalCase":
        fact = self.gold_fact.lower()
        bearing = [chunk for chunk in self.chunks if fact in chunk.text.lower()]
        if len(bearing) != 1:
            raise ValueError(
                f"case {self.case_id}: exactly one chunk must contain the gold fact, found {len(bearing)}"
            )
        if len(self.chunks) < 2:
            raise ValueError(f"case {self.case_id}: at least one conflicting chunk is required")
        if self.likelihoods is not None:
            missing = {chunk.chunk_id for chunk in self.chunks} - set(self.likelihoods)
            if missing:
                raise ValueError(f"case {self.case_id}: no likelihood for {sorted(missing)}")
            if any(not 0.0 <= value <= 1.0 for value in self.likelihoods.values()):
                raise ValueError(f"case {self.case_id}: likelihoods must be in [0, 1]")
        return self

    @property
    def gold_chunk(self) -> Chunk:
        fact = self.gold_fact.lower()
        return next(chunk for chunk in self.chunks if fact in chunk.text.lower())


class CaseRecord(BaseModel):
    """Per-case audit trail for both pipelines."""

    case_id: str
    question: str
    gold_fact: str
    hard: bool
    retrieved_chunk_ids: List[str]
    posteriors: Dict[str, float]
    baseline_template_id: TemplateId
    filtered_template_id: Optional[TemplateId] = None
    baseline_answer: str
    filtered_answer: Optional[str] = None
    baseline_correct: bool
    filtered_correct: bool
    filtered_empty: bool = False


class EvalReport(BaseModel):
    """Aggregate answer quality for baseline and filtered pipelines."""

    protocol: str = "synthetic"
    note: str = (
        "Synthetic conflicting-evidence protocol; demonstrates the filtering "
        "mechanism and is not a measurement on real corpora."
    )
    mode: RunMode
    filter_enabled: bool = True
    cases: int = Field(..., ge=0)
    baseline_correct: int = Field(..., ge=0)
    filtered_correct: int = Field(..., ge=0)
    baseline_accuracy: float = Field(..., ge=0.0, le=1.0)
    filtered_accuracy: float = Field(..., ge=0.0, le=1.0)
    relative_improvement_pct: Optional[float] = None
    absolute_improvement_pct: float
    hard_cases: int = 0
    prompt_versions: Dict[str, str] = Field(
        default_factory=lambda: {"grading": GRADING_TEMPLATE_VERSION, "judge": JUDGE_TEMPLATE_VERSION}
    )
    filtered_empty_cases: List[str] = Field(default_factory=list)
    records: List[CaseRecord] = Field(default_factory=list)

    @model_validator(mode="after")
    def validate_counts(self) -> "EvalReport":
        if self.baseline_correct > self.cases or self.filtered_correct > self.cases:
            raise ValueError("correct counts cannot exceed the number of cases")
        return self

    @classmethod
    def aggregate(
        cls,
        records: List[CaseRecord],
        mode: RunMode,
        filter_enabled: bool = True,
    ) -> "EvalReport":
        """Build the report from per-case records (order independent)."""
        records = sorted(records, key=lambda record: record.case_id)
        cases = len(records)
        baseline_correct = sum(1 for record in records if record.baseline_correct)
        filtered_correct = sum(1 for record in records if record.filtered_correct)
        baseline_accuracy = baseline_correct / cases if cases else 0.0
        filtered_accuracy = filtered_correct / cases if cases else 0.0

        relative = None
        if baseline_accuracy > 0:
            relative = 100.0 * (filtered_accuracy - baseline_accuracy) / baseline_accuracy

        return cls(
            mode=mode,
            filter_enabled=filter_enabled,
            cases=cases,
            baseline_correct=baseline_correct,
            filtered_correct=filtered_correct,
            baseline_accuracy=baseline_accuracy,
            filtered_accuracy=filtered_accuracy,
            relative_improvement_pct=relative,
            absolute_improvement_pct=100.0 * (filtered_accuracy - baseline_accuracy),
            hard_cases=sum(1 for record in records if record.hard),
            filtered_empty_cases=[record.case_id for record in records if record.filtered_empty],
            records=records,
        )
