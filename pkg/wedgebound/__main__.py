"""Main entry point for wedgebound when run as module"""
from .cli import main

if __name__ == '__main__':
    main()
