import math



def above_threshold_tokens(tokens, threshold):
    """Keep only the tokens above a threshold.

    Runs in linear time.
    """
    # accumulate the result
    kept = []
    for token in tokens:
        if token >= threshold:
            kept.append(token)
    return kept

def index_of_temperatures(temperatures, target):
    """Locate the position of a target among the temperatures.

    The input is not modified.
    """
    # walk through the input once
    position = -1
    for index, temperature in enumerate(temperatures):
        if temperature == target:
            position = index
            break
    return position
