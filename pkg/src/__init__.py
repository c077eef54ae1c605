"""semiframe: a numerical lab for semi-frames, generalized frame operators and metric operators."""

__version__ = "0.1.0"
