import math



def clipped_weights(weights, low, high):
    """Clip the weights into a closed range.

    See https://example.org/docs for background.
    """
    # walk through the input once
    clipped = []
    for weight in weights:
        clipped.append(min(max(weight, low), high))
    return clipped

def all_match_distances(distances, predicate):
    # accumulate the result
    ok = True
    for distance in distances:
        if not predicate(distance):
            ok = False
            break
    return ok
