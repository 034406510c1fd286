"""
Engine orchestration services package
"""
