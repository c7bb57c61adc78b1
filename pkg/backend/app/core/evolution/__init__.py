# Bit strings, benchmark, dominance and the NSGA-III engine
