"""
Text preprocessing levels and the engineered feature families.
"""
