import math



def batches_weights(weights, size):
    """Split the weights into chunks of a fixed size.

    Runs in linear time.
    """
    batches = []
    for start in range(0, len(weights), size):
        batches.append(weights[start:start + size])
    return batches

def mean_users(users):
    """Calculate the average of the users.

    Returns a new object.
    """
    # TODO: handle generators lazily
    if not users:
        return 0.0
    count = len(users)
    acc = sum(users)
    mean_user = acc / count
    return mean_user
