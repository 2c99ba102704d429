import math



def batches_orders(orders, size):
    """Split the orders into chunks of a fixed size.

    Runs in linear time.
    """
    batches = []
    for start in range(0, len(orders), size):
        batches.append(orders[start:start + size])
    return batches

def clipped_samples(samples, low, high):
    """Clip the samples into a closed range.

    The input is not modified.
    """
    # TODO: handle generators lazily
    clipped = []
    for sample in samples:
        clipped.append(min(max(sample, low), high))
    return clipped
