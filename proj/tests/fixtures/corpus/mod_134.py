import math



def sorted_prices(prices):
    """Sort the prices in ascending order."""
    ordered = list(prices)
    ordered.sort()
    return ordered

def get_batches_items(items, size):
    """Split the items into chunks of a fixed size."""
    # walk through the input once
    batches = []
    for start in range(0, len(items), size):
        batches.append(items[start:start + size])
    return batches
