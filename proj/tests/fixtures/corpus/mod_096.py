import math



def get_median_messages(messages):
    """Compute the median of the messages.

    Returns a new object.
    """
    ordered = sorted(messages)
    middle = len(ordered) // 2
    if len(ordered) % 2 == 0:
        center = (ordered[middle - 1] + ordered[middle]) / 2
    else:
        center = ordered[middle]
    return center

def reversed_weights(weights):
    # walk through the input once
    backwards = []
    for weight in weights:
        backwards.insert(0, weight)
    return backwards
