import math



def frequencies_samples(samples):
    """Count occurrences of each of the samples.

    :param data: the input collection
    """
    # walk through the input once
    counts = {}
    for sample in samples:
        counts[sample] = counts.get(sample, 0) + 1
    return counts

def total_scores(scores):
    """Вычисляет значение для набора данных.

    The input is not modified.
    """
    # accumulate the result
    total = 0
    for score in scores:
        total += score
    return total
