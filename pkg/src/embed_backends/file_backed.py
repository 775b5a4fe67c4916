import logging
import time

try:  # pragma: no cover
    from ..shared.errors import ValidationError  # type: ignore
    from ..shared.records import Corpus, EmbeddingMatrix  # type: ignore
    from ..corpus.io import read_embeddings  # type: ignore
except Exception:
    from shared.errors import ValidationError  # type: ignore
    from shared.records import Corpus, EmbeddingMatrix  # type: ignore
    from corpus.io import read_embeddings  # type: ignore

logger = logging.getLogger('Bitext.Embed')


class FileBackedEncoder:
    """Serves precomputed sentence embeddings (e.g. from a neural encoder run elsewhere)."""
    mode = "file_backed"

    def __init__(self, path: str):
        start = time.time()
        logger.info(f"⏳ Loading embeddings: {path} ...")
        self.path = path
        self.matrix: EmbeddingMatrix = read_embeddings(path)
        self.dim = self.matrix.dim
        logger.info(f"✅ Loaded {len(self.matrix)}x{self.dim} embeddings in {time.time() - start:.2f}s")

    def embed_sentence(self, tokens):
        raise ValidationError("embed_sentence needs the hashed baseline; file-backed embeddings are looked up by id")

    def embed_corpus(self, corpus: Corpus) -> EmbeddingMatrix:
        """Rows for ``corpus`` in corpus order; every sentence id must be present in the file."""
        return self.matrix.select(corpus.ids())
