"""Bundled OWL/XML reader, version 0.3. Only the read path is used here."""


def load(path):
    with open(path) as f:
        return parse(f.read())


def parse(text):
    axioms = []
    for chunk in text.split("<SubClassOf>")[1:]:
        axioms.append({"class": _iri(chunk), "nc": None, "verb": "..."})
    return axioms


def _iri(chunk):
    start = chunk.find('IRI="#') + len('IRI="#')
    return chunk[start : chunk.find('"', start)]
