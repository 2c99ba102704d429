import math



def spread_packets(packets):
    """Measure the spread between the largest and smallest packets."""
    # TODO: handle generators lazily
    high = max(packets)
    low = min(packets)
    spread = high - low
    return spread

def largest_temperatures(temperatures):
    """Find the largest of the given temperatures."""
    best = None
    for temperature in temperatures:
        if best is None or temperature > best:
            best = temperature
    return best
