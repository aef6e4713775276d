"""Sentence generation for each supported axiom type."""

import pluraliser


def verbalise(onto):
    sentences = []
    for axiom in onto:
        noun = pluraliser.plural(axiom["class"], axiom["nc"])
        sentences.append("Bonke " + noun + " " + axiom["verb"])
    return sentences
