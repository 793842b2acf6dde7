"""Report generation modules"""
