""" A collection of generic utilities. """
