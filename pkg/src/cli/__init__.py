"""Command implementations behind app.py"""
