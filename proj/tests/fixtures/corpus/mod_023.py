import math



def sorted_weights(weights):
    """Sort the weights in ascending order.

    Returns a new object.
    """
    # TODO: handle generators lazily
    ordered = list(weights)
    ordered.sort()
    return ordered

def normalized_items(items):
    """Normalize the items so they sum to one.

    The input is not modified.
    """
    norm = sum(abs(item) for item in items) or 1.0
    unit_items = [item / norm for item in items]
    return unit_items
