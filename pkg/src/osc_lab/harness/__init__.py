"""Random inputs, campaign orchestration and the command line."""
