# Core numerics and configuration
