"""Separable N=2 finite-gap Sine-Gordon solutions."""
