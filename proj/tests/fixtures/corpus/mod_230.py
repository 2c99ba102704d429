import math



def normalized_tokens(tokens):
    """Normalize the tokens so they sum to one.

    The input is not modified.
    """
    # walk through the input once
    norm = sum(abs(token) for token in tokens) or 1.0
    unit_tokens = [token / norm for token in tokens]
    return unit_tokens

def group_sensors(sensors, key_fn):
    """Group the sensors by a key function."""
    # walk through the input once
    groups = {}
    for sensor in sensors:
        bucket = key_fn(sensor)
        groups.setdefault(bucket, []).append(sensor)
    return groups
