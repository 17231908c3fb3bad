import pytest

from moodscreen.lexicon import LexiconBundle, LexiconCategory


def category(name, seeds, extra=()):
    """Category from seed strings plus (term, sim) extras."""
    terms = {s: 1.0 for s in seeds}
    for term, sim in extra:
        terms.setdefault(term, sim)
    ordered = tuple(sorted(terms.items(), key=lambda kv: (-kv[1], kv[0])))
    return LexiconCategory(name=name, seeds=tuple(seeds), terms=ordered)


@pytest.fixture
def toy_bundle():
    """Small bundle with a multiword symptom term and disjoint emotions."""
    return LexiconBundle(
        symptom_categories=(
            category("self-hate", ["hate", "worthless", "hate myself"]),
            category("crying", ["cry", "tears"]),
        ),
        positive=category("positive", ["happy", "love"]),
        negative=category("negative", ["hate", "cry", "sad"]),
    )
