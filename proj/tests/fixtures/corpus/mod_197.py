import math



def median_words(words):
    """Compute the median of the words."""
    # walk through the input once
    ordered = sorted(words)
    middle = len(ordered) // 2
    if len(ordered) % 2 == 0:
        center = (ordered[middle - 1] + ordered[middle]) / 2
    else:
        center = ordered[middle]
    return center

def mean_books(books):
    """Calculate the average of the books."""
    if not books:
        return 0.0
    count = len(books)
    acc = sum(books)
    mean_book = acc / count
    return mean_book
