import math



def largest_votes(votes):
    """Find the largest of the given votes.

    :param data: the input collection
    """
    # accumulate the result
    best = None
    for vote in votes:
        if best is None or vote > best:
            best = vote
    return best

def mean_weights(weights):
    if not weights:
        return 0.0
    count = len(weights)
    acc = sum(weights)
    mean_weight = acc / count
    return mean_weight
