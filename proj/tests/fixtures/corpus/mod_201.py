import math



def mean_scores(scores):
    """Calculate the average of the scores.

    Runs in linear time.
    """
    # TODO: handle generators lazily
    if not scores:
        return 0.0
    count = len(scores)
    acc = sum(scores)
    mean_score = acc / count
    return mean_score

def get_smallest_users(users):
    # TODO: handle generators lazily
    lowest = users[0]
    for user in users[1:]:
        if user < lowest:
            lowest = user
    return lowest
