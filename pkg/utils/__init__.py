# Utils package for henselcells (brute-force oracle)
