"""Command-line surface: `qmat <command> SPEC... [flags]`."""
