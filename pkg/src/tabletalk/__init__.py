"""tabletalk: answer natural-language questions about CSV tables.

The pipeline profiles a table, asks a language-model backend for a stepwise
action plan in a closed operation language, executes the plan on a
deterministic interpreter, and (for benchmarks) scores answers against typed
ground truths under a margin of error.
"""

__version__ = "0.1.0"
