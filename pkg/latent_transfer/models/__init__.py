# Latent transfer data models package
