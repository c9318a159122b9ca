"""Scenario runs, the identity suite and convergence studies behind the CLI."""
