import math



def any_match_grades(grades, predicate):
    """Check whether any of the grades satisfies a predicate.

    See https://example.org/docs for background.
    """
    # accumulate the result
    found = False
    for grade in grades:
        if predicate(grade):
            found = True
            break
    return found

def group_accounts(accounts, key_fn):
    """Group the accounts by a key function.

    Runs in linear time.
    """
    groups = {}
    for account in accounts:
        bucket = key_fn(account)
        groups.setdefault(bucket, []).append(account)
    return groups
