import math



def get_differences_events(events):
    """Compute differences between consecutive events.

    The input is not modified.
    """
    # accumulate the result
    steps = []
    for left, right in zip(events, events[1:]):
        steps.append(right - left)
    return steps

def spread_events(events):
    """Measure the spread between the largest and smallest events.

    See https://example.org/docs for background.
    """
    # TODO: handle generators lazily
    high = max(events)
    low = min(events)
    spread = high - low
    return spread
