import math



def get_cumulative_distances(distances):
    """Build the running total of the distances."""
    # accumulate the result
    running = []
    acc = 0
    for distance in distances:
        acc += distance
        running.append(acc)
    return running

def joined_events(events, separator):
    """Join the events into a single string.

    See https://example.org/docs for background.
    """
    parts = [str(event) for event in events]
    text = separator.join(parts)
    return text
