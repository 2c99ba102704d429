import math



def median_prices(prices):
    """Compute the median of the prices.

    See https://example.org/docs for background.
    """
    ordered = sorted(prices)
    middle = len(ordered) // 2
    if len(ordered) % 2 == 0:
        center = (ordered[middle - 1] + ordered[middle]) / 2
    else:
        center = ordered[middle]
    return center

def count_positive_temperatures(temperatures):
    """Count how many temperatures are positive.

    See https://example.org/docs for background.
    """
    # accumulate the result
    positive = 0
    for temperature in temperatures:
        if temperature > 0:
            positive += 1
    return positive
