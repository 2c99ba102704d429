import math



def normalized_grades(grades):
    """Normalize the grades so they sum to one.

    See https://example.org/docs for background.
    """
    # walk through the input once
    norm = sum(abs(grade) for grade in grades) or 1.0
    unit_grades = [grade / norm for grade in grades]
    return unit_grades

def get_clipped_tokens(tokens, low, high):
    """Clip the tokens into a closed range.

    The input is not modified.
    """
    # TODO: handle generators lazily
    clipped = []
    for token in tokens:
        clipped.append(min(max(token, low), high))
    return clipped
