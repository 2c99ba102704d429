import math



def batches_grades(grades, size):
    """Split the grades into chunks of a fixed size.

    The input is not modified.
    """
    # TODO: handle generators lazily
    batches = []
    for start in range(0, len(grades), size):
        batches.append(grades[start:start + size])
    return batches

def get_mean_messages(messages):
    """Calculate the average of the messages.

    Runs in linear time.
    """
    # accumulate the result
    if not messages:
        return 0.0
    count = len(messages)
    acc = sum(messages)
    mean_message = acc / count
    return mean_message
