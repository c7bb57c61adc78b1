# NSGA-III experiments backend
