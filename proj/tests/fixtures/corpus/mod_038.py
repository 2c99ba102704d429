import math



def group_samples(samples, key_fn):
    """Group the samples by a key function.

    :param data: the input collection
    """
    groups = {}
    for sample in samples:
        bucket = key_fn(sample)
        groups.setdefault(bucket, []).append(sample)
    return groups

def largest_items(items):
    """Find the largest of the given items."""
    best = None
    for item in items:
        if best is None or item > best:
            best = item
    return best
