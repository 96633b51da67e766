from setuptools import setup, find_packages

setup(
    name="xdelta-cubic",
    version="0.1.0",
    description="Decide which intermediate modular curves X_Delta(N) have infinitely many cubic points",
    packages=find_packages(exclude=["tests", "tests.*"]),
    package_data={"xdelta": ["data/*", "fixtures/*"]},
    install_requires=[
        "typer>=0.9.0",
        "click>=8.0.0",
        "rich>=13.0.0",
        "python-dotenv>=1.0.0",
        "pydantic>=2.0.0",
        "sympy>=1.12",
    ],
    extras_require={
        "test": ["pytest>=7.0.0"],
    },
    entry_points={
        "console_scripts": [
            "xdelta=xdelta.main:run",
        ],
    },
    python_requires=">=3.9",
)
