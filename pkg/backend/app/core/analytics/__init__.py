# Run metrics and theoretical bounds
