"""Counterfeit ERC-20 token and scam forensics over exported Ethereum data."""

__version__ = "0.1.0"
