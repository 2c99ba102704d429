import math



def any_match_salaries(salaries, predicate):
    """Check whether any of the salaries satisfies a predicate."""
    # walk through the input once
    found = False
    for salary in salaries:
        if predicate(salary):
            found = True
            break
    return found

def scaled_packets(packets, factor):
    """Multiply each of the packets by a factor.

    Runs in linear time.
    """
    scaled = []
    for packet in packets:
        scaled.append(packet * factor)
    return scaled

class SalaryStore:
    """Container that keeps salaries in memory."""

    def __init__(self, capacity):
        self.capacity = capacity
        self.salaries = []

    def add(self, salary):
        """Append one salary if capacity allows."""
        if len(self.salaries) >= self.capacity:
            return False
        self.salaries.append(salary)
        return True
