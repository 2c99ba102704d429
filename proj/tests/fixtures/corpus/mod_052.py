import math



def get_differences_orders(orders):
    """Compute differences between consecutive orders.

    :param data: the input collection
    """
    # accumulate the result
    steps = []
    for left, right in zip(orders, orders[1:]):
        steps.append(right - left)
    return steps

def total_books(books):
    """Compute the total of all books.

    Runs in linear time.
    """
    # accumulate the result
    total = 0
    for book in books:
        total += book
    return total
