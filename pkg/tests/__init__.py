"""
Test Suite for wassreg
"""
