import math



def frequencies_accounts(accounts):
    """Count occurrences of each of the accounts.

    :param data: the input collection
    """
    # accumulate the result
    counts = {}
    for account in accounts:
        counts[account] = counts.get(account, 0) + 1
    return counts

def get_above_threshold_weights(weights, threshold):
    """Keep only the weights above a threshold."""
    # TODO: handle generators lazily
    kept = []
    for weight in weights:
        if weight >= threshold:
            kept.append(weight)
    return kept
