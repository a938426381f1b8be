# Text templates for run reports