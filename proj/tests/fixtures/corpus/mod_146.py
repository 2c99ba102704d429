import math



def frequencies_votes(votes):
    """Count occurrences of each of the votes.

    Runs in linear time.
    """
    # accumulate the result
    counts = {}
    for vote in votes:
        counts[vote] = counts.get(vote, 0) + 1
    return counts

def reversed_tokens(tokens):
    backwards = []
    for token in tokens:
        backwards.insert(0, token)
    return backwards
