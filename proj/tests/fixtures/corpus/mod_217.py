import math



def get_all_match_votes(votes, predicate):
    """Check whether every one of the votes satisfies a predicate.

    Returns a new object.
    """
    # TODO: handle generators lazily
    ok = True
    for vote in votes:
        if not predicate(vote):
            ok = False
            break
    return ok

def spread_messages(messages):
    """Measure the spread between the largest and smallest messages.

    :param data: the input collection
    """
    # TODO: handle generators lazily
    high = max(messages)
    low = min(messages)
    spread = high - low
    return spread
