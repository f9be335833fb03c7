"""Shared builders for corpus fixtures."""

from frex.model import AnnotatedCorpus, Label, Review, Token

LABELS = {"O": Label.O, "B": Label.B, "I": Label.I}


def tok(surface: str, lemma: str | None = None, label: str = "O", pos: str = "") -> Token:
    return Token(surface, lemma if lemma is not None else surface.casefold(), pos, LABELS[label])


def review_from_labels(rid: str, labels, app: str = "a1", cat: str = "PR") -> Review:
    """Review with synthetic surfaces and the given per-sentence label letters."""
    sentences = tuple(
        tuple(tok(f"w{si}x{ti}", label=letter) for ti, letter in enumerate(sent))
        for si, sent in enumerate(labels)
    )
    return Review(rid, app, cat, sentences)


def review_from_words(rid: str, sentences_words, app: str = "a1", cat: str = "PR",
                      labels=None) -> Review:
    """Review built from whitespace-split sentence strings, all O unless given."""
    sentences = []
    for si, words in enumerate(sentences_words):
        words = words.split() if isinstance(words, str) else list(words)
        letters = labels[si] if labels is not None else ["O"] * len(words)
        sentences.append(tuple(tok(w, label=letter) for w, letter in zip(words, letters)))
    return Review(rid, app, cat, tuple(sentences))


def corpus(*reviews: Review) -> AnnotatedCorpus:
    return AnnotatedCorpus(tuple(reviews))
