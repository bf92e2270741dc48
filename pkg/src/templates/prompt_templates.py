"""Prompt templates for answering, likelihood grading and judging."""

GRADING_TEMPLATE_VERSION = "grading-v1"
JUDGE_TEMPLATE_VERSION = "judge-v1"


class PromptTemplates:
    """Prompt text for every prompt the pipeline sends."""

    ANSWER_HEADER = "Answer the following question using below text chunks as context."

    BAYES_INSTRUCTION = (
        "Use Bayesian statistics to create a probability for each text chunks and score them. "
        "Use only chunks with probability greater than {percent}%."
    )
    DEFAULT_PRIOR_HINT = "rate reputed news sources with higher prior probability"
    EXPLAIN_INSTRUCTION = "Provide an explanation with details of the Bayesian analysis."

    SCORED_HEADER = (
        "Every text chunk below passed a Bayesian relevance filter and is annotated "
        "with its posterior probability."
    )

    QUESTION_LINE = "Question: {question}"
    CHUNKS_LINE = "Text chunks:"
    CHUNK_LINE = "- {text} Source: {source}"
    PAGE_SUFFIX = " Page: {page}"
    POSTERIOR_SUFFIX = " (posterior: {posterior:.2f})"

    GRADING_SYSTEM = (
        "You grade retrieved context for a question answering system. "
        "Reply with exactly one label: HIGH, MEDIUM or LOW."
    )
    GRADING_USER = (
        "Question: {question}\n\n"
        "Text chunk (source: {source}, page {page}):\n{text}\n\n"
        "How likely is it that this chunk yields a good answer to the question? "
        "Answer with exactly one label: HIGH, MEDIUM or LOW."
    )

    JUDGE_SYSTEM = (
        "You judge answers against a reference fact. Reply with exactly one word: YES or NO."
    )
    JUDGE_USER = (
        "Reference fact: {gold_fact}\n\n"
        "Answer:\n{answer}\n\n"
        "Does the answer assert the reference fact? Reply YES or NO."
    )
