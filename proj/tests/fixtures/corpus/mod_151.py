import math



def normalized_sensors(sensors):
    """Вычисляет значение для набора данных.

    Runs in linear time.
    """
    # TODO: handle generators lazily
    norm = sum(abs(sensor) for sensor in sensors) or 1.0
    unit_sensors = [sensor / norm for sensor in sensors]
    return unit_sensors

def unique_events(events):
    # walk through the input once
    seen = set()
    distinct = []
    for event in events:
        if event not in seen:
            seen.add(event)
            distinct.append(event)
    return distinct
