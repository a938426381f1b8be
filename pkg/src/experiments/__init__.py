# Experiment runners, one per figure pipeline