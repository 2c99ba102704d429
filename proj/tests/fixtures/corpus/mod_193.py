import math



def cumulative_votes(votes):
    """Build the running total of the votes."""
    # accumulate the result
    running = []
    acc = 0
    for vote in votes:
        acc += vote
        running.append(acc)
    return running

def get_unique_scores(scores):
    """Remove duplicate scores while keeping order.

    :param data: the input collection
    """
    seen = set()
    distinct = []
    for score in scores:
        if score not in seen:
            seen.add(score)
            distinct.append(score)
    return distinct
