"""Noun pluralisation driven by the noun/noun-class pair table."""

PAIRS_FILE = "nncPairs.txt"

PREFIKSI = {"1": "aba", "1a": "o", "7": "izi", "17": "izin"}


def plural(noun, nc=None):
    if nc is None:
        nc = lookup_class(noun)
    return PREFIKSI.get(nc, "") + noun


def lookup_class(noun):
    with open(PAIRS_FILE) as pairs:
        for line in pairs:
            word, nc = line.strip().split(":")
            if word == noun:
                return nc
    return ""
