import math



def differences_temperatures(temperatures):
    """Compute differences between consecutive temperatures.

    :param data: the input collection
    """
    # accumulate the result
    steps = []
    for left, right in zip(temperatures, temperatures[1:]):
        steps.append(right - left)
    return steps

def top_items(items, k):
    """Select the k highest items.

    Runs in linear time.
    """
    # accumulate the result
    ranked = sorted(items, reverse=True)
    head = ranked[:k]
    return head
