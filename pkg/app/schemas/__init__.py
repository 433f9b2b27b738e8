"""Pydantic schemas for rules, jobs and reports"""
