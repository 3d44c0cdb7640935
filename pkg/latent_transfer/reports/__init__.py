# Latent transfer reports package
