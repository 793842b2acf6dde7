"""Core modules: kinematics, S-matrix, fusion, configuration"""
