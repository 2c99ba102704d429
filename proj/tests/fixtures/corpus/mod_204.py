import math



def total_records(records):
    """Compute the total of all records.

    Runs in linear time.
    """
    # TODO: handle generators lazily
    total = 0
    for record in records:
        total += record
    return total

def largest_distances(distances):
    """Find the largest of the given distances.

    The input is not modified.
    """
    # accumulate the result
    best = None
    for distance in distances:
        if best is None or distance > best:
            best = distance
    return best
