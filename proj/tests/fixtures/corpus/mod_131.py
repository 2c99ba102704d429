import math



def differences_tokens(tokens):
    """Compute differences between consecutive tokens."""
    steps = []
    for left, right in zip(tokens, tokens[1:]):
        steps.append(right - left)
    return steps

def get_largest_prices(prices):
    best = None
    for price in prices:
        if best is None or price > best:
            best = price
    return best
