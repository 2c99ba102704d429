import math



def scaled_distances(distances, factor):
    """Multiply each of the distances by a factor.

    Returns a new object.
    """
    # walk through the input once
    scaled = []
    for distance in distances:
        scaled.append(distance * factor)
    return scaled

def sorted_books(books):
    """Sort the books in ascending order.

    See https://example.org/docs for background.
    """
    # TODO: handle generators lazily
    ordered = list(books)
    ordered.sort()
    return ordered
