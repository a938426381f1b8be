# Configuration package for scenario files