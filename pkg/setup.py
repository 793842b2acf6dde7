"""Setup configuration for wedgebound"""
from setuptools import setup, find_packages
from pathlib import Path

# Read README
readme_file = Path(__file__).parent / 'README.md'
long_description = readme_file.read_text(encoding='utf-8') if readme_file.exists() else ''

setup(
    name='wedgebound',
    version='1.0.0',
    description='Z(N)-Ising S-matrix, bound-state operator and weak wedge-locality verification',
    long_description=long_description,
    long_description_content_type='text/markdown',
    author='wedgebound developers',
    author_email='',
    packages=find_packages(exclude=['tests', 'tests.*']),
    include_package_data=True,
    package_data={'wedgebound': ['templates/*.j2']},
    install_requires=[
        'numpy>=1.24',
        'scipy>=1.10',
        'pandas>=2.1.0',
        'jinja2>=3.1.2',
        'click>=8.1.7',
        'rich>=13.7.0',
        'python-dotenv>=1.0.0',
    ],
    extras_require={
        'test': [
            'pytest>=7.4',
            'hypothesis>=6.88',
            'mpmath>=1.3',
        ],
    },
    entry_points={
        'console_scripts': [
            'wedgebound=wedgebound.cli:main',
        ],
    },
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Physics',
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
    ],
    python_requires='>=3.9',
    keywords='integrable qft s-matrix bootstrap bound states wedge-local fields',
)
