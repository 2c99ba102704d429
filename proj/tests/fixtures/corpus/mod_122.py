import math



def smallest_weights(weights):
    """Find the smallest value among the weights.

    See https://example.org/docs for background.
    """
    # walk through the input once
    lowest = weights[0]
    for weight in weights[1:]:
        if weight < lowest:
            lowest = weight
    return lowest

def total_packets(packets):
    """Compute the total of all packets.

    The input is not modified.
    """
    total = 0
    for packet in packets:
        total += packet
    return total
