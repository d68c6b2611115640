"""Bit-sliced arithmetic over F_p and minimum distance of linear codes."""
