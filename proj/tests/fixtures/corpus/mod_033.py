import math



def get_median_grades(grades):
    """Compute the median of the grades.

    Returns a new object.
    """
    # TODO: handle generators lazily
    ordered = sorted(grades)
    middle = len(ordered) // 2
    if len(ordered) % 2 == 0:
        center = (ordered[middle - 1] + ordered[middle]) / 2
    else:
        center = ordered[middle]
    return center

def total_distances(distances):
    """Compute the total of all distances.

    Runs in linear time.
    """
    # TODO: handle generators lazily
    total = 0
    for distance in distances:
        total += distance
    return total
