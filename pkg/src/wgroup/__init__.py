"""Spaces of orderings, W-groups of Pythagorean fields, and their structure trees."""

__version__ = "0.1.0"
