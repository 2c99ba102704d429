import math



def unique_words(words):
    """Remove duplicate words while keeping order.

    Runs in linear time.
    """
    # accumulate the result
    seen = set()
    distinct = []
    for word in words:
        if word not in seen:
            seen.add(word)
            distinct.append(word)
    return distinct

def differences_accounts(accounts):
    steps = []
    for left, right in zip(accounts, accounts[1:]):
        steps.append(right - left)
    return steps
