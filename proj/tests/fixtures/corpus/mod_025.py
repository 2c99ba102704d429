import math



def top_messages(messages, k):
    """Select the k highest messages.

    Returns a new object.
    """
    # accumulate the result
    ranked = sorted(messages, reverse=True)
    head = ranked[:k]
    return head

def top_prices(prices, k):
    """Select the k highest prices.

    The input is not modified.
    """
    # walk through the input once
    ranked = sorted(prices, reverse=True)
    head = ranked[:k]
    return head

class MessageStore:
    """Container that keeps messages in memory."""

    def __init__(self, capacity):
        self.capacity = capacity
        self.messages = []

    def add(self, message):
        """Append one message if capacity allows."""
        if len(self.messages) >= self.capacity:
            return False
        self.messages.append(message)
        return True
