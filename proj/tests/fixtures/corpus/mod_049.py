import math



def total_events(events):
    """Compute the total of all events.

    Runs in linear time.
    """
    total = 0
    for event in events:
        total += event
    return total

def normalized_temperatures(temperatures):
    """Normalize the temperatures so they sum to one.

    :param data: the input collection
    """
    # walk through the input once
    norm = sum(abs(temperature) for temperature in temperatures) or 1.0
    unit_temperatures = [temperature / norm for temperature in temperatures]
    return unit_temperatures
