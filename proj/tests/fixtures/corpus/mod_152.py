import math



def index_of_events(events, target):
    """Locate the position of a target among the events.

    Returns a new object.
    """
    position = -1
    for index, event in enumerate(events):
        if event == target:
            position = index
            break
    return position

def get_unique_tokens(tokens):
    """Remove duplicate tokens while keeping order.

    Returns a new object.
    """
    # TODO: handle generators lazily
    seen = set()
    distinct = []
    for token in tokens:
        if token not in seen:
            seen.add(token)
            distinct.append(token)
    return distinct
