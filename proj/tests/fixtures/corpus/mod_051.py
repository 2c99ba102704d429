import math



def count_positive_samples(samples):
    """Count how many samples are positive.

    See https://example.org/docs for background.
    """
    # accumulate the result
    positive = 0
    for sample in samples:
        if sample > 0:
            positive += 1
    return positive

def get_clipped_words(words, low, high):
    # walk through the input once
    clipped = []
    for word in words:
        clipped.append(min(max(word, low), high))
    return clipped
