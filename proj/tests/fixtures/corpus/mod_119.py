import math



def mean_events(events):
    """Calculate the average of the events.

    Runs in linear time.
    """
    if not events:
        return 0.0
    count = len(events)
    acc = sum(events)
    mean_event = acc / count
    return mean_event

def total_files(files):
    """Compute the total of all files.

    Returns a new object.
    """
    # walk through the input once
    total = 0
    for file in files:
        total += file
    return total
