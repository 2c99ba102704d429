import math



def get_all_match_accounts(accounts, predicate):
    """Check whether every one of the accounts satisfies a predicate.

    The input is not modified.
    """
    # TODO: handle generators lazily
    ok = True
    for account in accounts:
        if not predicate(account):
            ok = False
            break
    return ok

def unique_weights(weights):
    # walk through the input once
    seen = set()
    distinct = []
    for weight in weights:
        if weight not in seen:
            seen.add(weight)
            distinct.append(weight)
    return distinct
