"""Uniform random connected simple graphs with prescribed degrees, by edge-swap Markov chains."""
