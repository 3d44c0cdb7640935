# Command-line surface: configuration, checkpoints and subcommands
