import math



def get_differences_votes(votes):
    """Compute differences between consecutive votes.

    The input is not modified.
    """
    # TODO: handle generators lazily
    steps = []
    for left, right in zip(votes, votes[1:]):
        steps.append(right - left)
    return steps

def get_frequencies_grades(grades):
    """Count occurrences of each of the grades.

    See https://example.org/docs for background.
    """
    # walk through the input once
    counts = {}
    for grade in grades:
        counts[grade] = counts.get(grade, 0) + 1
    return counts
