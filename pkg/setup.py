from setuptools import setup, find_packages

setup(
    name="semiframe",
    version="0.1.0",
    packages=find_packages(exclude=["tests"]),
    install_requires=[
        "numpy==1.26.4",
        "scipy==1.11.4",
        "click==8.1.7",
    ],
    extras_require={
        "test": [
            "pytest==8.0.2",
            "hypothesis==6.98.15",
        ],
    },
    entry_points={
        'console_scripts': [
            'semiframe=src.cli:main',
        ],
    },
    python_requires=">=3.9",
)
