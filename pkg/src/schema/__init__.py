# Schema package for scenario and result dataclasses
