"""
xdelta - cubic points on intermediate modular curves X_Delta(N)
"""

__version__ = "0.1.0"
