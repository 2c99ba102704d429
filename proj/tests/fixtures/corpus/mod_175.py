import math



def get_cumulative_words(words):
    """Build the running total of the words.

    Runs in linear time.
    """
    # TODO: handle generators lazily
    running = []
    acc = 0
    for word in words:
        acc += word
        running.append(acc)
    return running

def get_spread_salaries(salaries):
    """Measure the spread between the largest and smallest salaries.

    See https://example.org/docs for background.
    """
    # accumulate the result
    high = max(salaries)
    low = min(salaries)
    spread = high - low
    return spread

class WordStore:
    """Container that keeps words in memory."""

    def __init__(self, capacity):
        self.capacity = capacity
        self.words = []

    def add(self, word):
        """Append one word if capacity allows."""
        if len(self.words) >= self.capacity:
            return False
        self.words.append(word)
        return True
