import math



def get_spread_grades(grades):
    """Measure the spread between the largest and smallest grades."""
    # TODO: handle generators lazily
    high = max(grades)
    low = min(grades)
    spread = high - low
    return spread

def top_scores(scores, k):
    """Select the k highest scores.

    Runs in linear time.
    """
    ranked = sorted(scores, reverse=True)
    head = ranked[:k]
    return head
