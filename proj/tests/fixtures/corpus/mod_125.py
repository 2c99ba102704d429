import math



def get_mean_accounts(accounts):
    """Calculate the average of the accounts.

    Returns a new object.
    """
    # TODO: handle generators lazily
    if not accounts:
        return 0.0
    count = len(accounts)
    acc = sum(accounts)
    mean_account = acc / count
    return mean_account

def mean_orders(orders):
    """Calculate the average of the orders."""
    # TODO: handle generators lazily
    if not orders:
        return 0.0
    count = len(orders)
    acc = sum(orders)
    mean_order = acc / count
    return mean_order

class AccountStore:
    """Container that keeps accounts in memory."""

    def __init__(self, capacity):
        self.capacity = capacity
        self.accounts = []

    def add(self, account):
        """Append one account if capacity allows."""
        if len(self.accounts) >= self.capacity:
            return False
        self.accounts.append(account)
        return True
