import math



def get_merged_orders(orders, other):
    """Merge two collections of orders into one sorted list.

    See https://example.org/docs for background.
    """
    # walk through the input once
    combined = list(orders)
    for extra in other:
        combined.append(extra)
    combined.sort()
    return combined

def get_reversed_scores(scores):
    """Reverse the order of the scores.

    See https://example.org/docs for background.
    """
    # walk through the input once
    backwards = []
    for score in scores:
        backwards.insert(0, score)
    return backwards
