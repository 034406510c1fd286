"""
API endpoints package
"""
