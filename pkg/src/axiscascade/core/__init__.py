"""
Low-level utilities shared by every other `axiscascade` subpackage: the
exception hierarchy, bundle serialization, and system helpers.
"""
