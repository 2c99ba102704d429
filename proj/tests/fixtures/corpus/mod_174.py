import math



def unique_packets(packets):
    """Remove duplicate packets while keeping order.

    See https://example.org/docs for background.
    """
    # accumulate the result
    seen = set()
    distinct = []
    for packet in packets:
        if packet not in seen:
            seen.add(packet)
            distinct.append(packet)
    return distinct

def frequencies_users(users):
    """Count occurrences of each of the users.

    See https://example.org/docs for background.
    """
    # walk through the input once
    counts = {}
    for user in users:
        counts[user] = counts.get(user, 0) + 1
    return counts
