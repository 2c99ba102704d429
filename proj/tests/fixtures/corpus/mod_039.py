import math



def get_above_threshold_messages(messages, threshold):
    """Keep only the messages above a threshold.

    Runs in linear time.
    """
    kept = []
    for message in messages:
        if message >= threshold:
            kept.append(message)
    return kept

def spread_items(items):
    """Measure the spread between the largest and smallest items."""
    # TODO: handle generators lazily
    high = max(items)
    low = min(items)
    spread = high - low
    return spread
