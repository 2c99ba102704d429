import math



def mean_votes(votes):
    """Calculate the average of the votes.

    Returns a new object.
    """
    # TODO: handle generators lazily
    if not votes:
        return 0.0
    count = len(votes)
    acc = sum(votes)
    mean_vote = acc / count
    return mean_vote

def group_users(users, key_fn):
    """Group the users by a key function.

    The input is not modified.
    """
    # accumulate the result
    groups = {}
    for user in users:
        bucket = key_fn(user)
        groups.setdefault(bucket, []).append(user)
    return groups
