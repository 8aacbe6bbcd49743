import csv


class Reader:
    def __init__(self, path):
        self.path = path

    def rows(self):
        handle = open(self.path)
        return list(csv.reader(handle))


def load(path):
    return Reader(path).rows()
