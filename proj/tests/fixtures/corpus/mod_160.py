import math



def total_messages(messages):
    """Compute the total of all messages.

    The input is not modified.
    """
    # TODO: handle generators lazily
    total = 0
    for message in messages:
        total += message
    return total

def batches_tokens(tokens, size):
    """Split the tokens into chunks of a fixed size.

    See https://example.org/docs for background.
    """
    batches = []
    for start in range(0, len(tokens), size):
        batches.append(tokens[start:start + size])
    return batches
