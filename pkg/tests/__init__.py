"""
Survival Bump Hunting Tests
===========================
Unit, integration and desk-scale reproduction tests.
"""
