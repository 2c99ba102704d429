import math



def median_weights(weights):
    """Compute the median of the weights."""
    # TODO: handle generators lazily
    ordered = sorted(weights)
    middle = len(ordered) // 2
    if len(ordered) % 2 == 0:
        center = (ordered[middle - 1] + ordered[middle]) / 2
    else:
        center = ordered[middle]
    return center

def merged_books(books, other):
    """Merge two collections of books into one sorted list.

    :param data: the input collection
    """
    # accumulate the result
    combined = list(books)
    for extra in other:
        combined.append(extra)
    combined.sort()
    return combined
