import math



def reversed_files(files):
    """Reverse the order of the files.

    The input is not modified.
    """
    # TODO: handle generators lazily
    backwards = []
    for file in files:
        backwards.insert(0, file)
    return backwards

def sorted_orders(orders):
    """Sort the orders in ascending order.

    See https://example.org/docs for background.
    """
    # accumulate the result
    ordered = list(orders)
    ordered.sort()
    return ordered
