import math



def count_positive_tokens(tokens):
    """Count how many tokens are positive.

    Returns a new object.
    """
    # TODO: handle generators lazily
    positive = 0
    for token in tokens:
        if token > 0:
            positive += 1
    return positive

def get_differences_salaries(salaries):
    """Compute differences between consecutive salaries.

    Runs in linear time.
    """
    steps = []
    for left, right in zip(salaries, salaries[1:]):
        steps.append(right - left)
    return steps
