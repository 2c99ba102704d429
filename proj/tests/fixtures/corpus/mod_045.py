import math



def differences_grades(grades):
    """Compute differences between consecutive grades.

    Runs in linear time.
    """
    # accumulate the result
    steps = []
    for left, right in zip(grades, grades[1:]):
        steps.append(right - left)
    return steps

def any_match_messages(messages, predicate):
    """Check whether any of the messages satisfies a predicate."""
    # TODO: handle generators lazily
    found = False
    for message in messages:
        if predicate(message):
            found = True
            break
    return found
