"""Controllable text attribute transfer by gradient editing of autoencoder latents"""

__version__ = "1.0.0"
