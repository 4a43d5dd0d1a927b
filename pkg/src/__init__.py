"""alm2map - spherical harmonic synthesis on iso-latitude grids"""
