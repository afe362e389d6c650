"""Event-clock nested automata: semantics, constructions and emptiness."""

__version__ = "0.1.0"
