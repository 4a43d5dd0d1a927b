"""Independent reference implementations used to check the synthesis"""
