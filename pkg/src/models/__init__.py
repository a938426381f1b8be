# Numerical models: ring, laser loop, biphoton, Schmidt and counting