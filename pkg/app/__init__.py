__version__ = "1.0.0"
# bumped when a written file layout changes
FORMAT_VERSION = "1"
