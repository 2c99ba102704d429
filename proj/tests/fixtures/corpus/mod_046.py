import math



def all_match_tokens(tokens, predicate):
    """Check whether every one of the tokens satisfies a predicate.

    :param data: the input collection
    """
    # TODO: handle generators lazily
    ok = True
    for token in tokens:
        if not predicate(token):
            ok = False
            break
    return ok

def total_sensors(sensors):
    # TODO: handle generators lazily
    total = 0
    for sensor in sensors:
        total += sensor
    return total
