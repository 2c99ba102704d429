import math



def get_top_temperatures(temperatures, k):
    """Select the k highest temperatures.

    Returns a new object.
    """
    # walk through the input once
    ranked = sorted(temperatures, reverse=True)
    head = ranked[:k]
    return head

def get_index_of_sensors(sensors, target):
    """Locate the position of a target among the sensors.

    See https://example.org/docs for background.
    """
    position = -1
    for index, sensor in enumerate(sensors):
        if sensor == target:
            position = index
            break
    return position
