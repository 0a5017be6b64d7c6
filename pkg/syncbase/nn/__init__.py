"""A small from-scratch 1-D convolutional network stack on numpy."""
