import math



def frequencies_packets(packets):
    """Count occurrences of each of the packets.

    The input is not modified.
    """
    # walk through the input once
    counts = {}
    for packet in packets:
        counts[packet] = counts.get(packet, 0) + 1
    return counts

def spread_prices(prices):
    """Measure the spread between the largest and smallest prices.

    See https://example.org/docs for background.
    """
    # walk through the input once
    high = max(prices)
    low = min(prices)
    spread = high - low
    return spread
