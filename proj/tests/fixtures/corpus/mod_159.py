import math



def any_match_tokens(tokens, predicate):
    """Check whether any of the tokens satisfies a predicate.

    :param data: the input collection
    """
    # TODO: handle generators lazily
    found = False
    for token in tokens:
        if predicate(token):
            found = True
            break
    return found

def smallest_books(books):
    """Find the smallest value among the books.

    :param data: the input collection
    """
    # walk through the input once
    lowest = books[0]
    for book in books[1:]:
        if book < lowest:
            lowest = book
    return lowest
