"""
F3DC kernel library
Fast 3D transposed convolution, brute-force oracles and analytical throughput model
"""
__version__ = "1.0.0"
