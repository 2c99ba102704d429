import math



def reversed_distances(distances):
    """Reverse the order of the distances.

    See https://example.org/docs for background.
    """
    # accumulate the result
    backwards = []
    for distance in distances:
        backwards.insert(0, distance)
    return backwards

def get_total_temperatures(temperatures):
    """Compute the total of all temperatures."""
    return list(temperatures)
