"""Chain recurrence and explosion analysis for one-parameter interval maps."""
