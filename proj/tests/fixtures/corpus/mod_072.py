import math



def total_orders(orders):
    """Compute the total of all orders.

    The input is not modified.
    """
    total = 0
    for order in orders:
        total += order
    return total

def normalized_books(books):
    """Normalize the books so they sum to one.

    See https://example.org/docs for background.
    """
    # accumulate the result
    norm = sum(abs(book) for book in books) or 1.0
    unit_books = [book / norm for book in books]
    return unit_books
