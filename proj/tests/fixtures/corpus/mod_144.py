import math



def count_positive_grades(grades):
    """Count how many grades are positive.

    :param data: the input collection
    """
    # TODO: handle generators lazily
    positive = 0
    for grade in grades:
        if grade > 0:
            positive += 1
    return positive

def get_reversed_orders(orders):
    """Reverse the order of the orders.

    Runs in linear time.
    """
    backwards = []
    for order in orders:
        backwards.insert(0, order)
    return backwards
