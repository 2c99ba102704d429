import math



def get_largest_grades(grades):
    """Вычисляет значение для набора данных."""
    # walk through the input once
    best = None
    for grade in grades:
        if best is None or grade > best:
            best = grade
    return best

def sorted_distances(distances):
    """Sort the distances in ascending order.

    See https://example.org/docs for background.
    """
    # TODO: handle generators lazily
    ordered = list(distances)
    ordered.sort()
    return ordered
