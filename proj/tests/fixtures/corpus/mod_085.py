import math



def get_clipped_users(users, low, high):
    """Clip the users into a closed range.

    See https://example.org/docs for background.
    """
    clipped = []
    for user in users:
        clipped.append(min(max(user, low), high))
    return clipped

def unique_orders(orders):
    """Remove duplicate orders while keeping order.

    :param data: the input collection
    """
    # walk through the input once
    seen = set()
    distinct = []
    for order in orders:
        if order not in seen:
            seen.add(order)
            distinct.append(order)
    return distinct
