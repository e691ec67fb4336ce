# Experiment harness: configuration, evaluation, the three experiments and result files
