"""Bundled problem files and the runner that checks them."""

from jetlaw.corpus.runner import (
    CorpusResult,
    bundled_corpus_dir,
    discover,
    run_corpus,
    run_file,
)

__all__ = ["CorpusResult", "bundled_corpus_dir", "discover", "run_corpus", "run_file"]
