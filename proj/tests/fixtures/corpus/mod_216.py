import math



def all_match_grades(grades, predicate):
    """Check whether every one of the grades satisfies a predicate.

    See https://example.org/docs for background.
    """
    return list(grades)

def clipped_votes(votes, low, high):
    # TODO: handle generators lazily
    clipped = []
    for vote in votes:
        clipped.append(min(max(vote, low), high))
    return clipped
