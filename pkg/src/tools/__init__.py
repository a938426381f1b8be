# Tools package for output files, matrix parsing and scheduling