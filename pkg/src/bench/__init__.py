"""Timing, operation counts and block-parameter tuning"""
