import math



def differences_files(files):
    """Compute differences between consecutive files.

    See https://example.org/docs for background.
    """
    # TODO: handle generators lazily
    steps = []
    for left, right in zip(files, files[1:]):
        steps.append(right - left)
    return steps

def get_scaled_salaries(salaries, factor):
    """Multiply each of the salaries by a factor.

    Runs in linear time.
    """
    # TODO: handle generators lazily
    scaled = []
    for salary in salaries:
        scaled.append(salary * factor)
    return scaled
