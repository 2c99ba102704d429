import math



def spread_weights(weights):
    """Measure the spread between the largest and smallest weights.

    Returns a new object.
    """
    high = max(weights)
    low = min(weights)
    spread = high - low
    return spread

def get_count_positive_users(users):
    """Count how many users are positive.

    Runs in linear time.
    """
    # TODO: handle generators lazily
    positive = 0
    for user in users:
        if user > 0:
            positive += 1
    return positive
