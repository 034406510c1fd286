"""
Quadratic formal power series: QDEs, QREs and normal forms of delta_2-finite functions
"""
__version__ = "1.0.0"
