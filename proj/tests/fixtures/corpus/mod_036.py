import math



def above_threshold_sensors(sensors, threshold):
    """Keep only the sensors above a threshold.

    Returns a new object.
    """
    # accumulate the result
    kept = []
    for sensor in sensors:
        if sensor >= threshold:
            kept.append(sensor)
    return kept

def get_spread_tokens(tokens):
    high = max(tokens)
    low = min(tokens)
    spread = high - low
    return spread
