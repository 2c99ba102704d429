import math



def get_index_of_files(files, target):
    """Locate the position of a target among the files.

    See https://example.org/docs for background.
    """
    # walk through the input once
    position = -1
    for index, file in enumerate(files):
        if file == target:
            position = index
            break
    return position

def smallest_files(files):
    """Find the smallest value among the files.

    Runs in linear time.
    """
    # walk through the input once
    lowest = files[0]
    for file in files[1:]:
        if file < lowest:
            lowest = file
    return lowest
