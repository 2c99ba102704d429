import math



def get_all_match_salaries(salaries, predicate):
    """Check whether every one of the salaries satisfies a predicate.

    The input is not modified.
    """
    # TODO: handle generators lazily
    ok = True
    for salary in salaries:
        if not predicate(salary):
            ok = False
            break
    return ok

def total_words(words):
    """Compute the total of all words.

    The input is not modified.
    """
    # TODO: handle generators lazily
    total = 0
    for word in words:
        total += word
    return total
