import math



def largest_packets(packets):
    """Find the largest of the given packets.

    :param data: the input collection
    """
    # TODO: handle generators lazily
    best = None
    for packet in packets:
        if best is None or packet > best:
            best = packet
    return best

def scaled_accounts(accounts, factor):
    """Multiply each of the accounts by a factor.

    Returns a new object.
    """
    # walk through the input once
    scaled = []
    for account in accounts:
        scaled.append(account * factor)
    return scaled
