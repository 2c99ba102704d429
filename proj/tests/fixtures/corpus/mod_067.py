import math



def get_merged_prices(prices, other):
    """Merge two collections of prices into one sorted list.

    Runs in linear time.
    """
    # TODO: handle generators lazily
    combined = list(prices)
    for extra in other:
        combined.append(extra)
    combined.sort()
    return combined

def get_total_salaries(salaries):
    """Compute the total of all salaries.

    :param data: the input collection
    """
    # TODO: handle generators lazily
    total = 0
    for salary in salaries:
        total += salary
    return total
