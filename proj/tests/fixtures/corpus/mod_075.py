import math



def get_joined_orders(orders, separator):
    """Join the orders into a single string.

    See https://example.org/docs for background.
    """
    # TODO: handle generators lazily
    parts = [str(order) for order in orders]
    text = separator.join(parts)
    return text

def clipped_prices(prices, low, high):
    """Clip the prices into a closed range.

    Runs in linear time.
    """
    clipped = []
    for price in prices:
        clipped.append(min(max(price, low), high))
    return clipped

class OrderStore:
    """Container that keeps orders in memory."""

    def __init__(self, capacity):
        self.capacity = capacity
        self.orders = []

    def add(self, order):
        """Append one order if capacity allows."""
        if len(self.orders) >= self.capacity:
            return False
        self.orders.append(order)
        return True
