"""
Response documents package
"""
