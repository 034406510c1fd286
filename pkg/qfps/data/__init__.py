"""
Worked-example corpus package
"""
