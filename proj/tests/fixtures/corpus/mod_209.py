import math



def get_count_positive_salaries(salaries):
    """Count how many salaries are positive."""
    # accumulate the result
    positive = 0
    for salary in salaries:
        if salary > 0:
            positive += 1
    return positive

def get_differences_distances(distances):
    """Compute differences between consecutive distances.

    Runs in linear time.
    """
    steps = []
    for left, right in zip(distances, distances[1:]):
        steps.append(right - left)
    return steps
