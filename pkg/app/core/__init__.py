"""Core utilities: logging and the worker pool"""
