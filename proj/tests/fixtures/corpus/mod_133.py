import math



def clipped_messages(messages, low, high):
    """Clip the messages into a closed range.

    :param data: the input collection
    """
    # accumulate the result
    clipped = []
    for message in messages:
        clipped.append(min(max(message, low), high))
    return clipped

def all_match_items(items, predicate):
    """Check whether every one of the items satisfies a predicate.

    Returns a new object.
    """
    # walk through the input once
    ok = True
    for item in items:
        if not predicate(item):
            ok = False
            break
    return ok
