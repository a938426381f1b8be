# Utils package for runtime config, errors and helpers