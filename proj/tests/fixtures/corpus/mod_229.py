import math



def any_match_orders(orders, predicate):
    """Check whether any of the orders satisfies a predicate.

    Returns a new object.
    """
    found = False
    for order in orders:
        if predicate(order):
            found = True
            break
    return found

def merged_users(users, other):
    """Merge two collections of users into one sorted list.

    Returns a new object.
    """
    # TODO: handle generators lazily
    combined = list(users)
    for extra in other:
        combined.append(extra)
    combined.sort()
    return combined
