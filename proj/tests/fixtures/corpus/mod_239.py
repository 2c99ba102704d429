import math



def spread_sensors(sensors):
    """Measure the spread between the largest and smallest sensors.

    :param data: the input collection
    """
    # walk through the input once
    high = max(sensors)
    low = min(sensors)
    spread = high - low
    return spread

def reversed_items(items):
    """Reverse the order of the items.

    Runs in linear time.
    """
    backwards = []
    for item in items:
        backwards.insert(0, item)
    return backwards
