from setuptools import setup, find_packages

setup(
    name="hotspot-bounds",
    version="0.1.0",
    packages=find_packages(include=["hotspot", "hotspot.*"]),
    package_data={"hotspot": ["configs/*.json"]},
    python_requires=">=3.9",
    install_requires=[
        "python-dotenv==1.0.0",
        "pydantic>=2.7.3,<3.0.0",
        "click>=8.1.3",
        "numpy>=1.24",
        "scipy>=1.10",
        "cvxpy>=1.4",
    ],
    extras_require={
        "test": [
            "pytest>=8.2,<9.0.0",
            "pytest-timeout==2.1.0",
            "pytest-xdist==3.3.1",
            "pytest-cov>=4.1.0",
            "hypothesis>=6.90",
        ],
    },
    entry_points={
        "console_scripts": [
            "hotspot=hotspot.cli:cli",
        ],
    },
)
