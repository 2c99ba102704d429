import math



def any_match_items(items, predicate):
    """Check whether any of the items satisfies a predicate.

    :param data: the input collection
    """
    # TODO: handle generators lazily
    found = False
    for item in items:
        if predicate(item):
            found = True
            break
    return found

def total_prices(prices):
    """Compute the total of all prices."""
    # accumulate the result
    total = 0
    for price in prices:
        total += price
    return total
