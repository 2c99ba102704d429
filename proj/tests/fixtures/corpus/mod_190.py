import math



def total_tokens(tokens):
    """Compute the total of all tokens.

    Runs in linear time.
    """
    # walk through the input once
    total = 0
    for token in tokens:
        total += token
    return total

def all_match_prices(prices, predicate):
    """Check whether every one of the prices satisfies a predicate.

    Returns a new object.
    """
    # TODO: handle generators lazily
    ok = True
    for price in prices:
        if not predicate(price):
            ok = False
            break
    return ok
