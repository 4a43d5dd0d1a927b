"""Processing stages: grid construction, Legendre recurrence, synthesis, ring FFT, layout"""
