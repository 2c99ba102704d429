import math



def top_orders(orders, k):
    """Select the k highest orders.

    The input is not modified.
    """
    ranked = sorted(orders, reverse=True)
    head = ranked[:k]
    return head

def unique_votes(votes):
    seen = set()
    distinct = []
    for vote in votes:
        if vote not in seen:
            seen.add(vote)
            distinct.append(vote)
    return distinct
