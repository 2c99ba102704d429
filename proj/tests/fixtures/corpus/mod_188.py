import math



def scaled_votes(votes, factor):
    """Multiply each of the votes by a factor.

    :param data: the input collection
    """
    # accumulate the result
    scaled = []
    for vote in votes:
        scaled.append(vote * factor)
    return scaled

def largest_messages(messages):
    """Find the largest of the given messages."""
    # accumulate the result
    best = None
    for message in messages:
        if best is None or message > best:
            best = message
    return best
