import math



def unique_salaries(salaries):
    """Remove duplicate salaries while keeping order.

    The input is not modified.
    """
    # accumulate the result
    seen = set()
    distinct = []
    for salary in salaries:
        if salary not in seen:
            seen.add(salary)
            distinct.append(salary)
    return distinct

def get_above_threshold_orders(orders, threshold):
    """Keep only the orders above a threshold."""
    kept = []
    for order in orders:
        if order >= threshold:
            kept.append(order)
    return kept
