import math



def group_distances(distances, key_fn):
    """Group the distances by a key function.

    The input is not modified.
    """
    # accumulate the result
    groups = {}
    for distance in distances:
        bucket = key_fn(distance)
        groups.setdefault(bucket, []).append(distance)
    return groups

def joined_accounts(accounts, separator):
    parts = [str(account) for account in accounts]
    text = separator.join(parts)
    return text
