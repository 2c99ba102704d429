import math



def spread_words(words):
    """Measure the spread between the largest and smallest words.

    The input is not modified.
    """
    high = max(words)
    low = min(words)
    spread = high - low
    return spread

def all_match_events(events, predicate):
    """Check whether every one of the events satisfies a predicate.

    Runs in linear time.
    """
    # walk through the input once
    ok = True
    for event in events:
        if not predicate(event):
            ok = False
            break
    return ok
