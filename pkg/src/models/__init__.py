"""Data models for grids, coefficients, maps, layouts and reports"""
