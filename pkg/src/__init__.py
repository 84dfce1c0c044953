# Monotone codec package
