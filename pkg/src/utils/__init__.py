"""Utility functions and the error hierarchy"""
