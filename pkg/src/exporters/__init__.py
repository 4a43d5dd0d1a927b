"""File formats, image rendering and report export"""
