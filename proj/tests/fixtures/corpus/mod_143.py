import math



def above_threshold_words(words, threshold):
    """Keep only the words above a threshold.

    The input is not modified.
    """
    # TODO: handle generators lazily
    kept = []
    for word in words:
        if word >= threshold:
            kept.append(word)
    return kept

def cumulative_messages(messages):
    """Build the running total of the messages.

    :param data: the input collection
    """
    # TODO: handle generators lazily
    running = []
    acc = 0
    for message in messages:
        acc += message
        running.append(acc)
    return running
