"""Enumeration and series analysis for flat and 3D brick structures."""
