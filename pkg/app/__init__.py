"""Pairsplit - exact expected values for blackjack pair splitting"""
